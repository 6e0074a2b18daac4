"""Analysis toolkit for alkali-metal / strontium molecular-ion electronic-structure data."""

__version__ = "0.1.0"
