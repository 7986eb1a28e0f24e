"""Pydantic models shared by the configuration and report schemas.

JSON has no complex number type, so complex coefficients and canceller weights are
written as explicit real/imaginary (I/Q) pairs.
"""

from pydantic import BaseModel, ConfigDict, Field


class ComplexValue(BaseModel):
    """Model for a complex scalar written as its I and Q parts.

    Attributes:
        re (float): In-phase (real) part.
        im (float): Quadrature (imaginary) part.
    """

    model_config = ConfigDict(extra="forbid")

    re: float = Field(0.0, description="In-phase (real) part")
    im: float = Field(0.0, description="Quadrature (imaginary) part")

    @property
    def value(self) -> complex:
        """Return the coefficient as a Python complex."""
        return complex(self.re, self.im)

    @classmethod
    def from_complex(cls, value: complex) -> "ComplexValue":
        """Build the model from a Python (or numpy) complex scalar."""
        return cls(re=float(value.real), im=float(value.imag))
