"""Exact scalar fields and a small dense linear-algebra kernel.

Two ground fields are supported: the rationals (values are
:class:`fractions.Fraction`) and prime fields ``GF(p)`` (values are Python
ints in ``[0, p)``).  Field objects do not wrap scalars; they only know how
to normalize, invert, parse and print them.  This keeps inner loops on
native ``+`` and ``*`` with a single :meth:`Field.norm` at the end.

Nothing here ever touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class FieldMismatch(ValueError):
    pass


class Field:
    """Base class for exact fields."""

    name: str

    zero = 0
    one = 1

    def norm(self, x):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def parse(self, s: str):
        raise NotImplementedError

    def format(self, x) -> str:
        raise NotImplementedError

    def __call__(self, x):
        return self.norm(x)

    def __eq__(self, other):
        return isinstance(other, Field) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return self.name


class Rationals(Field):
    name = "q"

    def norm(self, x):
        if type(x) is Fraction:
            return x
        return Fraction(x)

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(x)

    def parse(self, s: str):
        if not isinstance(s, str):
            raise ValueError(f"scalar must be a string, got {s!r}")
        return Fraction(s)

    def format(self, x) -> str:
        x = Fraction(x)
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"


class PrimeField(Field):
    def __init__(self, p: int):
        if not (2 <= p < 2**31) or not _is_prime(p):
            raise ValueError(f"prime field modulus must be a prime below 2^31, got {p}")
        self.p = p
        self.name = f"f:{p}"

    def norm(self, x):
        if type(x) is int:
            return x % self.p
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def inv(self, x):
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def parse(self, s: str):
        if not isinstance(s, str):
            raise ValueError(f"scalar must be a string, got {s!r}")
        return self.norm(Fraction(s))

    def format(self, x) -> str:
        return str(int(x) % self.p)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


QQ = Rationals()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_name(name: str) -> Field:
    """Parse ``"q"`` or ``"f:<p>"``."""
    if name == "q":
        return QQ
    if name.startswith("f:"):
        try:
            p = int(name[2:])
        except ValueError:
            raise ValueError(f"bad field name {name!r}") from None
        return PrimeField(p)
    raise ValueError(f"bad field name {name!r}")


@dataclass(frozen=True)
class Matrix:
    """Dense matrix with entries in one field, stored row-major."""

    field: Field
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows * cols")

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
        flat = tuple(field.norm(x) for r in rows for x in r)
        return cls(field, len(rows), ncols, flat)

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Matrix":
        return cls(field, rows, cols, (field.zero,) * (rows * cols))

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls(field, n, n, tuple(field.one if i == j else field.zero
                                       for i in range(n) for j in range(n)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def tolist(self) -> list[list]:
        return [list(self.row(i)) for i in range(self.rows)]

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries)

    def _check(self, other: "Matrix"):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        f = self.field
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for j in range(other.cols):
                s = 0
                for k in range(self.cols):
                    a = r[k]
                    if a:
                        s += a * other.entries[k * other.cols + j]
                out.append(f.norm(s))
        return Matrix(f, self.rows, other.cols, tuple(out))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        f = self.field
        return Matrix(f, self.rows, self.cols,
                      tuple(f.norm(a + b) for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "Matrix":
        f = self.field
        return Matrix(f, self.rows, self.cols, tuple(f.norm(-a) for a in self.entries))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        f = self.field
        return Matrix(f, self.rows, self.cols, tuple(f.norm(c * a) for a in self.entries))

    def apply(self, v: Sequence) -> tuple:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        f = self.field
        out = []
        for i in range(self.rows):
            s = 0
            r = self.row(i)
            for k in range(self.cols):
                if v[k]:
                    s += r[k] * v[k]
            out.append(f.norm(s))
        return tuple(out)

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.cols, self.rows,
                      tuple(self.entries[i * self.cols + j]
                            for j in range(self.cols) for i in range(self.rows)))


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row-echelon form and the (strictly increasing) pivot columns."""
    f = m.field
    a = m.tolist()
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        if r == m.rows:
            break
        piv = next((i for i in range(r, m.rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = f.inv(a[r][c])
        a[r] = [f.norm(x * inv) for x in a[r]]
        for i in range(m.rows):
            if i != r and a[i][c] != 0:
                k = a[i][c]
                a[i] = [f.norm(x - k * y) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return Matrix.from_rows(f, a, cols=m.cols), pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def solve(a: Matrix, b: Sequence):
    """Canonical solution of ``a x = b`` (free variables zero), or ``None``."""
    if len(b) != a.rows:
        raise ValueError("a.rows must equal len(b)")
    f = a.field
    aug = Matrix.from_rows(f, [list(a.row(i)) + [b[i]] for i in range(a.rows)], cols=a.cols + 1)
    red, pivots = rref(aug)
    if pivots and pivots[-1] == a.cols:
        return None
    x = [f.zero] * a.cols
    for i, c in enumerate(pivots):
        x[c] = red[i, a.cols]
    return tuple(x)


def kernel_basis(a: Matrix) -> Matrix:
    """Columns span ker(a): one per free column, in column order."""
    f = a.field
    red, pivots = rref(a)
    free = [j for j in range(a.cols) if j not in set(pivots)]
    cols = []
    for j in free:
        v = [f.zero] * a.cols
        v[j] = f.one
        for i, c in enumerate(pivots):
            v[c] = f.norm(-red[i, j])
        cols.append(v)
    return Matrix.from_rows(f, [[cols[k][i] for k in range(len(cols))] for i in range(a.cols)],
                            cols=len(cols))


class SparseSystem:
    """Incremental sparse elimination for large, very sparse linear systems.

    Rows are ``{column: coefficient}`` dicts; columns are ordered integers.
    The solution returned by :meth:`solution` sets every non-pivot column to
    zero, which is the same canonical solution :func:`solve` produces for the
    dense form of the system.
    """

    def __init__(self, field: Field, ncols: int):
        self.field = field
        self.ncols = ncols
        self._pivots: dict[int, tuple[dict, object]] = {}
        self.consistent = True

    def add_row(self, row: dict, rhs) -> None:
        f = self.field
        row = {c: f.norm(v) for c, v in row.items() if f.norm(v) != 0}
        rhs = f.norm(rhs)
        piv = self._pivots
        while True:
            hits = [c for c in row if c in piv]
            if not hits:
                break
            c = min(hits)
            k = row[c]
            prow, prhs = piv[c]
            for j, v in prow.items():
                nv = f.norm(row.get(j, 0) - k * v)
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
            rhs = f.norm(rhs - k * prhs)
        if not row:
            if rhs != 0:
                self.consistent = False
            return
        c = min(row)
        inv = f.inv(row[c])
        row = {j: f.norm(v * inv) for j, v in row.items()}
        piv[c] = (row, f.norm(rhs * inv))

    @property
    def pivot_columns(self) -> list[int]:
        return sorted(self._pivots)

    def solution(self):
        if not self.consistent:
            return None
        f = self.field
        x = [f.zero] * self.ncols
        for c in sorted(self._pivots, reverse=True):
            row, rhs = self._pivots[c]
            s = rhs
            for j, v in row.items():
                if j != c and x[j]:
                    s -= v * x[j]
            x[c] = f.norm(s)
        return x


def solve_sparse(field: Field, ncols: int, rows: Iterable[tuple[dict, object]]):
    sys_ = SparseSystem(field, ncols)
    for row, rhs in rows:
        sys_.add_row(row, rhs)
    return sys_.solution()
