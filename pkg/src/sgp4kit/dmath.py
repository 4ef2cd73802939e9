"""Generic elementwise math for the propagation kernel.

Every arithmetic primitive the kernel needs is routed through this
module so that the identical kernel source runs on three kinds of
operand:

* numpy float64 scalars/arrays,
* numpy float32 scalars/arrays,
* :class:`Dual` values carrying forward-mode tangents.

A ``Dual`` holds a primal array plus a stack of tangent arrays with one
leading axis per seeded direction; all operations apply the chain rule.
Branch conditions are always evaluated on primal values, so selects
pick the tangent of the branch that was actually taken.
"""

from __future__ import annotations

import numpy as np


class Dual:
    """Forward-mode dual number over numpy values.

    ``value`` has any broadcastable shape; ``tan`` has shape
    ``(k,) + value.shape`` for ``k`` simultaneously seeded directions.
    """

    __slots__ = ("value", "tan")
    __array_priority__ = 100  # keep numpy from absorbing us in mixed ops

    def __init__(self, value, tan):
        self.value = np.asarray(value, dtype=np.float64)
        self.tan = np.asarray(tan, dtype=np.float64)

    @classmethod
    def constant(cls, value, k: int) -> "Dual":
        value = np.asarray(value, dtype=np.float64)
        return cls(value, np.zeros((k,) + value.shape))

    @classmethod
    def seed(cls, value, direction: int, k: int) -> "Dual":
        value = np.asarray(value, dtype=np.float64)
        tan = np.zeros((k,) + value.shape)
        tan[direction] = 1.0
        return cls(value, tan)

    # -- helpers ----------------------------------------------------

    @staticmethod
    def _split(other):
        if isinstance(other, Dual):
            return other.value, other.tan
        return np.asarray(other, dtype=np.float64), 0.0

    # -- arithmetic -------------------------------------------------

    def __add__(self, other):
        ov, ot = self._split(other)
        return Dual(self.value + ov, self.tan + ot)

    __radd__ = __add__

    def __sub__(self, other):
        ov, ot = self._split(other)
        return Dual(self.value - ov, self.tan - ot)

    def __rsub__(self, other):
        ov, ot = self._split(other)
        return Dual(ov - self.value, ot - self.tan)

    def __mul__(self, other):
        ov, ot = self._split(other)
        return Dual(self.value * ov, self.tan * ov + self.value * ot)

    __rmul__ = __mul__

    def __truediv__(self, other):
        ov, ot = self._split(other)
        return Dual(self.value / ov, (self.tan * ov - self.value * ot) / (ov * ov))

    def __rtruediv__(self, other):
        ov, ot = self._split(other)
        return Dual(ov / self.value,
                    (ot * self.value - ov * self.tan) / (self.value * self.value))

    def __pow__(self, p):
        # constant exponents only; that is all the kernel uses
        p = float(p)
        return Dual(np.power(self.value, p),
                    p * np.power(self.value, p - 1.0) * self.tan)

    def __mod__(self, other):
        # modulus by a constant: derivative of x - floor(x/c)*c is 1
        ov, _ = self._split(other)
        return Dual(self.value % ov, self.tan.copy())

    def __neg__(self):
        return Dual(-self.value, -self.tan)

    def __abs__(self):
        s = np.sign(self.value)
        return Dual(np.abs(self.value), s * self.tan)

    # -- comparisons operate on primals ----------------------------

    def __lt__(self, other):
        return self.value < self._split(other)[0]

    def __le__(self, other):
        return self.value <= self._split(other)[0]

    def __gt__(self, other):
        return self.value > self._split(other)[0]

    def __ge__(self, other):
        return self.value >= self._split(other)[0]

    def __repr__(self):
        return f"Dual(value={self.value!r}, tan={self.tan!r})"


def value_of(x):
    """Primal part of ``x`` (identity for plain arrays)."""
    return x.value if isinstance(x, Dual) else x


def _lift(x, like: Dual) -> Dual:
    if isinstance(x, Dual):
        return x
    k = like.tan.shape[0]
    return Dual.constant(x, k)


def _tan_to(tan: np.ndarray, shape: tuple) -> np.ndarray:
    """View a tangent stack as ``(k,) + shape`` for a select.

    Constant-lifted duals may carry fewer value dimensions than the
    other operand; missing axes are inserted after the direction axis.
    """
    k = tan.shape[0]
    extra = tan.shape[1:]
    tan = tan.reshape((k,) + (1,) * (len(shape) - len(extra)) + extra)
    return np.broadcast_to(tan, (k,) + shape)


def sqrt(x):
    if isinstance(x, Dual):
        r = np.sqrt(x.value)
        return Dual(r, x.tan / (2.0 * r))
    return np.sqrt(x)


def sin(x):
    if isinstance(x, Dual):
        return Dual(np.sin(x.value), np.cos(x.value) * x.tan)
    return np.sin(x)


def cos(x):
    if isinstance(x, Dual):
        return Dual(np.cos(x.value), -np.sin(x.value) * x.tan)
    return np.cos(x)


def atan2(y, x):
    if isinstance(y, Dual) or isinstance(x, Dual):
        anchor = y if isinstance(y, Dual) else x
        y = _lift(y, anchor)
        x = _lift(x, anchor)
        denom = x.value * x.value + y.value * y.value
        value = np.arctan2(y.value, x.value)
        shape = np.shape(value)
        return Dual(value,
                    (x.value * _tan_to(y.tan, shape)
                     - y.value * _tan_to(x.tan, shape)) / denom)
    return np.arctan2(y, x)


def power(x, p):
    """``x ** p`` for constant ``p``, forced through the ufunc loop.

    Numpy scalar ``__pow__`` takes a different code path than the array
    power loop and can differ in the last ulp, which would break the
    bitwise batch-equals-scalar contract; ``np.power`` on an array view
    always uses the loop.
    """
    if isinstance(x, Dual):
        return x ** p
    return np.power(np.asarray(x), p)


def fabs(x):
    if isinstance(x, Dual):
        return abs(x)
    return np.abs(x)


def where(cond, a, b):
    """Both-branch select; ``cond`` is a plain boolean array."""
    cond = np.asarray(value_of(cond))
    if isinstance(a, Dual) or isinstance(b, Dual):
        anchor = a if isinstance(a, Dual) else b
        a = _lift(a, anchor)
        b = _lift(b, anchor)
        value = np.where(cond, a.value, b.value)
        shape = np.shape(value)
        return Dual(value, np.where(cond, _tan_to(a.tan, shape),
                                    _tan_to(b.tan, shape)))
    return np.where(cond, a, b)


def maximum(x, floor):
    """Guarding max; selects the tangent of the larger operand."""
    return where(value_of(x) >= value_of(floor), x, floor)


def mod_twopi_signed(x):
    """The reference convention: ``x % 2pi`` toward zero for negatives."""
    twopi = 2.0 * np.pi
    return where(value_of(x) >= 0.0, x % twopi, -((-x) % twopi))
