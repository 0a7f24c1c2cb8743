"""Second-order training of feed-forward networks: tetrad Hessian-vector
products, exact Newton and MK directions, and the closed-form spectrum."""

from ._core import (
    Direction,
    Error,
    Params,
    Schedule,
    closed_form_spectrum,
    dense_hessian,
    forward,
    gradient,
    hvp,
    init,
    load_params,
    mk_damped,
    mk_direction,
    newton_exact,
    parse_idx_images,
    parse_idx_labels,
    predict,
    save_params,
    spectral_schedule,
    train_step,
    verify,
)

__all__ = [
    "Direction",
    "Error",
    "Params",
    "Schedule",
    "closed_form_spectrum",
    "dense_hessian",
    "forward",
    "gradient",
    "hvp",
    "init",
    "load_params",
    "mk_damped",
    "mk_direction",
    "newton_exact",
    "parse_idx_images",
    "parse_idx_labels",
    "predict",
    "save_params",
    "spectral_schedule",
    "train_step",
    "verify",
]
