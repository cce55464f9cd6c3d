"""Exact localization engine for Chern numbers of stable-pair moduli on toric 3-folds."""

__version__ = "0.1.0"

from .errors import PtCobordismError  # noqa: E402,F401
