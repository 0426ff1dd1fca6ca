"""Shift-pair bookkeeping: a, b, c = a - b and their decompositions."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ShiftPair:
    """The two shifts and the derived c = a - b.

    Components follow the decomposition a = alpha + i alpha_p,
    b = beta + i beta_p, c = gamma + i gamma_p; c is constructed from
    a and b so that gamma = alpha - beta and gamma_p = alpha_p - beta_p
    hold exactly in binary64.
    """

    a: complex
    b: complex
    c: complex = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "c", complex(self.a.real - self.b.real,
                                              self.a.imag - self.b.imag))

    @property
    def alpha(self) -> float:
        return self.a.real

    @property
    def alpha_p(self) -> float:
        return self.a.imag

    @property
    def beta(self) -> float:
        return self.b.real

    @property
    def beta_p(self) -> float:
        return self.b.imag

    @property
    def gamma(self) -> float:
        return self.c.real

    @property
    def gamma_p(self) -> float:
        return self.c.imag

    def conjugate(self) -> "ShiftPair":
        """The pair (conj a, conj b); with t -> -t this conjugates the
        chi product."""
        return ShiftPair(self.a.conjugate(), self.b.conjugate())

    def reflected(self) -> "ShiftPair":
        """The pair (-conj b, -conj a), under which both Theorem-1
        integrands conjugate pointwise in t."""
        return ShiftPair(-self.b.conjugate(), -self.a.conjugate())
