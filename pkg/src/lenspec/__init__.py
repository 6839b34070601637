"""Exact p-spectra of lens spaces and lens orbifolds."""

from lenspec.lens import LensParams, canonical_form, enumerate_classes, is_isometric

__version__ = "0.1.0"

__all__ = ["LensParams", "canonical_form", "enumerate_classes", "is_isometric", "__version__"]
