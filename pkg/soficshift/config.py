from pydantic import BaseModel, ConfigDict, Field


class Limits(BaseModel):
    """Resource caps shared by the exploration routines. Exceeding one is an error, never a truncation."""

    model_config = ConfigDict(frozen=True)

    state_cap: int = Field(100_000, ge=1, description="Maximum number of subset-construction states")
    relation_cap: int = Field(1_000_000, ge=1, description="Maximum number of transition-monoid relations")
    ideal_vertex_cap: int = Field(20, ge=1, description="Maximum vertex count for ideal-lattice enumeration")
    layer_candidate_cap: int = Field(
        24, ge=1, description="Maximum number of foundation candidates in the layer branch-and-bound"
    )


DEFAULT_LIMITS = Limits()
