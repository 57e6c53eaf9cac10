"""Triangle, shear and length coordinates for Hitchin representations of
closed surface groups, with exact reconstruction of holonomies."""

__version__ = "0.1.0"
