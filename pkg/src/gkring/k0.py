"""The ring Z[X]/(X - X^2) and its isomorphism with Z x Z."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class K0Elem:
    """``a*X + b`` modulo ``X^2 - X``. Python ints: no overflow."""

    a: int = 0
    b: int = 0

    @classmethod
    def from_int(cls, n: int) -> "K0Elem":
        return cls(0, int(n))

    @classmethod
    def from_Z2(cls, at0: int, at1: int) -> "K0Elem":
        return cls(at1 - at0, at0)

    def to_Z2(self) -> tuple[int, int]:
        """Evaluation at X=0 and X=1: X -> (0, 1), 1 - X -> (1, 0)."""
        return (self.b, self.a + self.b)

    def _coerce(self, other) -> "K0Elem":
        if isinstance(other, K0Elem):
            return other
        if isinstance(other, int):
            return K0Elem.from_int(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return K0Elem(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return K0Elem(-self.a, -self.b)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return K0Elem(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        # X^2 = X
        return K0Elem(self.a * other.a + self.a * other.b + other.a * self.b, self.b * other.b)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    def poly(self) -> str:
        a, b = self.a, self.b
        if a == 0:
            return str(b)
        head = {1: "X", -1: "-X"}.get(a, f"{a}X")
        if b == 0:
            return head
        return f"{head}{'+' if b > 0 else '-'}{abs(b)}"

    def to_json(self) -> dict:
        return {"class": {"a": self.a, "b": self.b}, "poly": self.poly(), "Z2": list(self.to_Z2())}

    def __str__(self) -> str:
        return self.poly()


ZERO = K0Elem(0, 0)
ONE = K0Elem(0, 1)
X = K0Elem(1, 0)
