"""Birkhoff normal forms and effective stability time estimates."""

from ._core import (
    DomainError,
    Error,
    GradedSeries,
    HyperbolicOrbitError,
    NormalFormState,
    NotEllipticError,
    ParseError,
    Polynomial,
    ResonanceError,
    SmallDivisorError,
    UnknownFixtureError,
    __version__,
    available_orders,
    birkhoff_normal_form,
    check_nonresonance,
    complexify,
    eccentricity,
    escape_time,
    fixture_digest,
    fixture_names,
    lie_exp,
    make_grid,
    oscillator,
    poincare_variables,
    poisson_bracket,
    realify,
    run_cli,
    stability_time,
    sweep,
    theta_weight,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
