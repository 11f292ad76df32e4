"""Mirror systems that realize plane maps by two, four or six reflections."""

from ._periscope import (
    Domain,
    PeriscopeError,
    PlaneMap,
    ScalarField,
    factor_linear,
    parse_scene,
    patch_obj,
    pencil_map,
    pencil_map_geometric,
    realize,
    recover_gradient,
    serialize_scene,
    synthesize,
    trace,
    verify,
)


def error_code(exc: PeriscopeError) -> str:
    """The code prefix of a PeriscopeError message, e.g. "c-too-small"."""
    return str(exc).split(":", 1)[0]


__all__ = [
    "Domain",
    "PeriscopeError",
    "PlaneMap",
    "ScalarField",
    "error_code",
    "factor_linear",
    "parse_scene",
    "patch_obj",
    "pencil_map",
    "pencil_map_geometric",
    "realize",
    "recover_gradient",
    "serialize_scene",
    "synthesize",
    "trace",
    "verify",
]
