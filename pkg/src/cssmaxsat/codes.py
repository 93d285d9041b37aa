"""CSS codes: sparse binary matrices, built-in generators, file formats and checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from . import gf2
from .errors import (
    CssViolation,
    DegenerateCode,
    InvalidParameter,
    InvalidResidual,
    ParseError,
    RankMismatch,
)


@dataclass(frozen=True, eq=True)
class BitMatrix:
    """Binary matrix stored as sorted column-index tuples per row."""

    rows: tuple
    cols: int

    def __post_init__(self):
        rows = tuple(tuple(int(c) for c in r) for r in self.rows)
        for i, r in enumerate(rows):
            if any(b <= a for a, b in zip(r, r[1:])):
                raise InvalidParameter(f"row {i} indices must be strictly increasing")
            if r and (r[0] < 0 or r[-1] >= self.cols):
                raise InvalidParameter(f"row {i} has a column index outside [0, {self.cols})")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_dense(cls, a) -> BitMatrix:
        a = gf2.as_gf2(a)
        if a.ndim != 2:
            raise InvalidParameter("dense matrix must be 2-d")
        return cls(tuple(tuple(np.flatnonzero(r).tolist()) for r in a), a.shape[1])

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int) -> BitMatrix:
        return cls(tuple(tuple(sorted(set(r))) for r in rows), cols)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    @property
    def shape(self):
        return (len(self.rows), self.cols)

    @cached_property
    def dense(self) -> np.ndarray:
        a = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self.rows):
            a[i, list(r)] = 1
        a.setflags(write=False)
        return a

    @cached_property
    def rank(self) -> int:
        return gf2.rank(self.dense)

    def row_weights(self) -> list:
        return [len(r) for r in self.rows]

    def __matmul__(self, v):
        v = np.asarray(v)
        return gf2.matmul(self.dense, v)

    def transpose(self) -> BitMatrix:
        return BitMatrix.from_dense(self.dense.T)


def check_weight_profile(h: BitMatrix) -> list:
    weights = h.row_weights()
    if any(w < 1 for w in weights):
        raise InvalidParameter("parity-check rows of weight 0 are not allowed")
    return weights


@dataclass(frozen=True)
class CssCode:
    """A CSS code [[n, k, d]] with explicit logical operators.

    ``lx`` holds X-type logicals (commuting with the Z checks ``hz``) and ``lz``
    the Z-type ones, paired so that ``lx @ lz.T`` is the identity.
    """

    hx: BitMatrix
    hz: BitMatrix
    lx: BitMatrix = None
    lz: BitMatrix = None
    d: int = None
    name: str = "css"
    k: int = field(init=False)

    def __post_init__(self):
        n = self.hx.cols
        if n == 0:
            raise DegenerateCode("a code needs at least one qubit")
        if self.hz.cols != n:
            raise InvalidParameter("Hx and Hz must have the same number of columns")
        check_weight_profile(self.hx)
        check_weight_profile(self.hz)
        bad = css_violation(self.hx, self.hz)
        if bad is not None:
            raise CssViolation(f"Hx row {bad[0]} and Hz row {bad[1]} overlap on an odd number of qubits", bad)
        k = n - self.hx.rank - self.hz.rank
        object.__setattr__(self, "k", k)
        if self.lx is None or self.lz is None:
            lx, lz = logical_operators(self.hx, self.hz)
            object.__setattr__(self, "lx", lx)
            object.__setattr__(self, "lz", lz)

    @property
    def n(self) -> int:
        return self.hx.cols

    def __repr__(self):
        return f"CssCode({self.name!r}, [[{self.n},{self.k},{self.d}]])"


def css_violation(hx: BitMatrix, hz: BitMatrix):
    """First (x_row, z_row) pair with odd overlap, or ``None``."""
    prod = gf2.matmul(hx.dense, hz.dense.T)
    hits = np.argwhere(prod)
    if hits.size:
        return tuple(int(i) for i in hits[0])
    return None


def logical_operators(hx: BitMatrix, hz: BitMatrix):
    """Symplectic basis of logical operators by elimination over GF(2)."""
    ax = gf2.independent_rows(hx.dense, gf2.nullspace(hz.dense))
    az = gf2.independent_rows(hz.dense, gf2.nullspace(hx.dense))
    n = hx.cols
    if ax.shape[0] == 0:
        empty = BitMatrix((), n)
        return empty, empty
    gram = gf2.matmul(ax, az.T)
    # lz = (gram^-1)^T az makes lx lz^T = I
    lz = gf2.matmul(gf2.inverse(gram).T, az)
    return BitMatrix.from_dense(ax), BitMatrix.from_dense(lz)


# --- generators -----------------------------------------------------------


def gen_toric(d: int) -> CssCode:
    """Toric code [[2d^2, 2, d]] on a d x d periodic square lattice."""
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise InvalidParameter("toric code needs d >= 2")

    def h(i, j):
        return (i % d) * d + (j % d)

    def v(i, j):
        return d * d + (i % d) * d + (j % d)

    stars, plaquettes = [], []
    for i in range(d):
        for j in range(d):
            stars.append({h(i, j), h(i, j - 1), v(i, j), v(i - 1, j)})
            plaquettes.append({h(i, j), h(i + 1, j), v(i, j), v(i, j + 1)})
    n = 2 * d * d
    return CssCode(
        hx=BitMatrix.from_rows(stars, n),
        hz=BitMatrix.from_rows(plaquettes, n),
        d=d,
        name=f"toric-{d}",
    )


def gen_rotated_surface(d: int) -> CssCode:
    """Rotated surface code [[d^2, 1, d]] with weight-2 boundary checks."""
    if not isinstance(d, (int, np.integer)) or d < 3 or d % 2 == 0:
        raise InvalidParameter("rotated surface code needs odd d >= 3")
    xs, zs = [], []
    for r in range(d + 1):
        for c in range(d + 1):
            support = [
                rr * d + cc
                for rr, cc in ((r - 1, c - 1), (r - 1, c), (r, c - 1), (r, c))
                if 0 <= rr < d and 0 <= cc < d
            ]
            is_x = (r + c) % 2 == 0
            if len(support) == 4:
                (xs if is_x else zs).append(support)
            elif len(support) == 2:
                # X checks on the top/bottom edges, Z checks on the left/right edges
                if r in (0, d) and is_x:
                    xs.append(support)
                elif c in (0, d) and not is_x:
                    zs.append(support)
    n = d * d
    return CssCode(
        hx=BitMatrix.from_rows(xs, n),
        hz=BitMatrix.from_rows(zs, n),
        d=d,
        name=f"rotated-surface-{d}",
    )


def gen_color_666(d: int) -> CssCode:
    """Triangular 6.6.6 color code [[(3d^2+1)/4, 1, d]], self-dual.

    Sites of a triangular patch of the triangular lattice are three-colored by
    ``(row + col) % 3``; class 1 hosts the faces, the other two the qubits.
    """
    if not isinstance(d, (int, np.integer)) or d < 3 or d % 2 == 0:
        raise InvalidParameter("6.6.6 color code needs odd d >= 3")
    size = 3 * (d - 1) // 2
    sites = [(r, c) for r in range(size + 1) for c in range(r + 1)]
    qubits = [s for s in sites if (s[0] + s[1]) % 3 != 1]
    index = {q: i for i, q in enumerate(qubits)}
    faces = []
    for r, c in sites:
        if (r + c) % 3 != 1:
            continue
        around = ((r, c + 1), (r, c - 1), (r + 1, c), (r - 1, c), (r + 1, c + 1), (r - 1, c - 1))
        faces.append([index[q] for q in around if q in index])
    h = BitMatrix.from_rows(faces, len(qubits))
    return CssCode(hx=h, hz=h, d=d, name=f"color-666-{d}")


def repetition_checks(n: int) -> BitMatrix:
    """Z checks of the length-n repetition code (adjacent pairs)."""
    if n < 2:
        raise InvalidParameter("repetition code needs n >= 2")
    return BitMatrix.from_rows([(i, i + 1) for i in range(n - 1)], n)


GENERATORS = {
    "toric": gen_toric,
    "rotated-surface": gen_rotated_surface,
    "color-666": gen_color_666,
}


def generate(family: str, d: int) -> CssCode:
    try:
        gen = GENERATORS[family]
    except KeyError:
        raise InvalidParameter(f"unknown code family {family!r}; choose from {sorted(GENERATORS)}") from None
    return gen(d)


# --- validation -----------------------------------------------------------


@dataclass
class ValidationReport:
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failures(self) -> list:
        return [name for name, passed in self.checks.items() if not passed]


def _commute(a: BitMatrix, b: BitMatrix) -> bool:
    if a.num_rows == 0 or b.num_rows == 0:
        return True
    return not np.any(gf2.matmul(a.dense, b.dense.T))


def validate_css(code: CssCode) -> ValidationReport:
    """Evaluate every structural invariant of ``code`` without raising."""
    if code.n == 0:
        raise DegenerateCode("a code needs at least one qubit")
    k_expected = code.n - code.hx.rank - code.hz.rank
    checks = {
        "hx_hz_commute": _commute(code.hx, code.hz),
        "lx_commutes_with_hz": _commute(code.lx, code.hz),
        "lz_commutes_with_hx": _commute(code.lz, code.hx),
        "logical_counts": code.lx.num_rows == code.lz.num_rows == k_expected,
        "rank_nullity": code.k == k_expected,
        "nonzero_check_weights": all(w >= 1 for w in code.hx.row_weights() + code.hz.row_weights()),
    }
    if code.lx.num_rows and code.lx.num_rows == code.lz.num_rows:
        pairing = gf2.matmul(code.lx.dense, code.lz.dense.T)
        checks["symplectic_pairing"] = bool(np.array_equal(pairing, np.eye(code.lx.num_rows)))
        # logicals must not lie in the stabilizer group
        checks["lx_independent_of_hx"] = gf2.rank(np.vstack([code.hx.dense, code.lx.dense])) == code.hx.rank + code.lx.num_rows
        checks["lz_independent_of_hz"] = gf2.rank(np.vstack([code.hz.dense, code.lz.dense])) == code.hz.rank + code.lz.num_rows
    else:
        checks["symplectic_pairing"] = code.lx.num_rows == code.lz.num_rows == 0
    return ValidationReport(checks)


def logical_failure(code: CssCode, residual_x, residual_z) -> bool:
    """True iff a post-correction residual flips some logical qubit."""
    rx = gf2.as_gf2(residual_x).reshape(-1)
    rz = gf2.as_gf2(residual_z).reshape(-1)
    if rx.size != code.n or rz.size != code.n:
        raise InvalidResidual(f"residuals must have length {code.n}")
    if np.any(code.hz @ rx) or np.any(code.hx @ rz):
        raise InvalidResidual("residual has a nonzero syndrome")
    if code.k == 0:
        return False
    return bool(np.any(code.lz @ rx) or np.any(code.lx @ rz))


def min_logical_weight(code: CssCode, sector: str = "x", max_n: int = 25) -> int:
    """Brute-force weight of the lightest logical operator of one sector.

    Sector ``"x"`` searches X-type operators (kernel of Hz, outside rowspace Hx).
    Enumerates vectors by increasing weight, so only meant for small codes.
    """
    if code.n > max_n:
        raise InvalidParameter(f"exhaustive distance limited to n <= {max_n}")
    checks, logicals = (code.hz, code.lz) if sector == "x" else (code.hx, code.lx)
    hd = checks.dense.astype(np.int64)
    ld = logicals.dense.astype(np.int64)
    for w in range(1, code.n + 1):
        for support in itertools.combinations(range(code.n), w):
            cols = list(support)
            if np.any(hd[:, cols].sum(axis=1) % 2):
                continue
            if np.any(ld[:, cols].sum(axis=1) % 2):
                return w
    return 0


# --- file formats ---------------------------------------------------------

_SECTIONS = ("Hx", "Hz", "Lx", "Lz")


def dumps_code(code: CssCode) -> str:
    """Matrix-text format: 0-based indices, a blank line closes a section."""
    lines = [f"css {code.name} {code.n} {code.k} {code.d if code.d is not None else 0}"]
    for label, mat in zip(_SECTIONS, (code.hx, code.hz, code.lx, code.lz)):
        lines.append(label)
        lines.extend(" ".join(str(c) for c in row) for row in mat.rows)
        lines.append("")
    return "\n".join(lines)


def save_code(code: CssCode, path) -> None:
    Path(path).write_text(dumps_code(code), encoding="utf-8")


def parse_code_text(text: str) -> CssCode:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty code file")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "css":
        raise ParseError("header must read 'css <name> <n> <k> <d>'")
    try:
        name, n, k, d = head[1], int(head[2]), int(head[3]), int(head[4])
    except ValueError as exc:
        raise ParseError(f"bad header: {exc}") from None
    sections = {}
    current = None
    for lineno, line in enumerate(lines[1:], start=2):
        token = line.strip()
        if current is None:
            if not token:
                continue
            if token not in _SECTIONS:
                raise ParseError(f"line {lineno}: expected a section name, got {token!r}")
            if token in sections:
                raise ParseError(f"line {lineno}: duplicate section {token}")
            current = token
            sections[current] = []
        elif not token:
            current = None
        else:
            try:
                sections[current].append([int(x) for x in token.split()])
            except ValueError:
                raise ParseError(f"line {lineno}: non-integer column index") from None
    for label in ("Hx", "Hz"):
        if label not in sections:
            raise ParseError(f"missing section {label}")
    mats = {}
    for label, rows in sections.items():
        for r in rows:
            if any(c < 0 or c >= n for c in r):
                raise ParseError(f"section {label}: column index out of range for n={n}")
        try:
            mats[label] = BitMatrix.from_rows(rows, n)
        except InvalidParameter as exc:
            raise ParseError(f"section {label}: {exc}") from None
    for label in ("Hx", "Hz"):
        if any(len(r) == 0 for r in mats[label].rows):
            raise ParseError(f"section {label}: zero-weight row")
    code = CssCode(
        hx=mats["Hx"],
        hz=mats["Hz"],
        lx=mats.get("Lx"),
        lz=mats.get("Lz"),
        d=d or None,
        name=name,
    )
    if code.k != k:
        raise RankMismatch(f"declared k={k} but n - rank(Hx) - rank(Hz) = {code.k}")
    if "Lx" in mats:
        report = validate_css(code)
        if not report.ok:
            raise CssViolation(f"logical operators fail: {', '.join(report.failures())}")
    return code


def write_alist(h: BitMatrix, path) -> None:
    m, n = h.shape
    col_sets = [[] for _ in range(n)]
    for i, r in enumerate(h.rows):
        for c in r:
            col_sets[c].append(i)
    max_col = max((len(c) for c in col_sets), default=0)
    max_row = max((len(r) for r in h.rows), default=0)
    out = [f"{n} {m}", f"{max_col} {max_row}"]
    out.append(" ".join(str(len(c)) for c in col_sets))
    out.append(" ".join(str(len(r)) for r in h.rows))
    for c in col_sets:
        out.append(" ".join(str(i + 1) for i in c + [-1] * (max_col - len(c))))
    for r in h.rows:
        out.append(" ".join(str(j + 1) for j in list(r) + [-1] * (max_row - len(r))))
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def read_alist(path) -> BitMatrix:
    try:
        nums = [int(x) for x in Path(path).read_text(encoding="utf-8").split()]
    except ValueError:
        raise ParseError(f"{path}: alist files contain integers only") from None
    try:
        n, m, max_col, max_row = nums[:4]
        pos = 4 + n + m  # skip the column and row weight lists
        row_weights = nums[4 + n : pos]
        pos += n * max_col
        rows = []
        for i in range(m):
            entries = nums[pos : pos + max_row]
            pos += max_row
            r = sorted(j - 1 for j in entries if j > 0)
            if len(r) != row_weights[i]:
                raise ParseError(f"{path}: row {i} weight disagrees with its header")
            rows.append(r)
    except (ValueError, IndexError):
        raise ParseError(f"{path}: truncated alist file") from None
    return BitMatrix.from_rows(rows, n)


def load_code(path, format: str = "matrix-text", hz_path=None, name=None, d=None) -> CssCode:
    """Load a code from disk.

    ``matrix-text`` reads the native format. ``alist`` reads Hx from ``path``
    and Hz from ``hz_path`` (self-dual when ``hz_path`` is omitted).
    """
    if format == "matrix-text":
        return parse_code_text(Path(path).read_text(encoding="utf-8"))
    if format == "alist":
        hx = read_alist(path)
        hz = read_alist(hz_path) if hz_path is not None else hx
        return CssCode(hx=hx, hz=hz, d=d, name=name or Path(path).stem)
    raise InvalidParameter(f"unknown code format {format!r}")
