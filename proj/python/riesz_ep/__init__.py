"""Python bindings for the riesz_ep C++ core."""

from ._core import (
    ConfigError,
    Grid,
    GridSpec,
    MollifyResult,
    MollifyUnattainable,
    __version__,
    electric_potential,
    hls_exponents,
    integrate,
    lp_norm,
    mollify_approximate,
    mollify_ladder,
    newton_constant,
    read_grid,
    relative_power,
    riesz_apply_direct,
    riesz_apply_fast,
    simulate,
    suite_names,
    verify,
    write_grid,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
