"""Element-wise computation over views: vectorized kernels with broadcasting,
in-place variants, comparisons, boolean-row selection, and a naive matrix
product.

Every kernel walks the output in C-order; operands expanded by broadcasting
reread the same bytes through zero strides instead of being materialized.
Each invocation adds one scalar-op unit per output element to the active
counting scope (the matrix product adds 2*m*n*k: one multiply and one add per
accumulation step). Kernels are single-threaded; see counters for the scoping
rules.
"""

from __future__ import annotations

import math
import operator
from typing import Union

from .broadcast import broadcast_shapes, broadcast_view
from .core import (
    ArrayView,
    copy_elements,
    create,
    gather,
    index_axis,
    reshape,
    scatter,
)
from .counters import CounterReport, counting, record_scalar_ops
from .dtypes import DType, Kind, bool_, field_lookup, float64
from .errors import (
    BroadcastError,
    IntegerDivisionError,
    NotWriteableError,
    ShapeError,
)

__all__ = [
    "BINARY_OPS",
    "UNARY_OPS",
    "COMPARE_OPS",
    "CounterReport",
    "counting",
    "promote_dtypes",
    "elementwise_binary",
    "scalar_binary",
    "elementwise_unary",
    "elementwise_binary_inplace",
    "compare",
    "mask_select",
    "dot",
    "field_view",
]

BINARY_OPS = ("add", "sub", "mul", "div")
UNARY_OPS = ("square", "sqrt", "neg")
COMPARE_OPS = ("ge", "gt", "le", "lt", "eq", "ne")

Scalar = Union[int, float, bool]

_SIGNED_FOR_UNSIGNED = {1: 2, 2: 4, 4: 8}


def promote_dtypes(a: DType, b: DType) -> DType:
    """Result dtype of combining two operand dtypes.

    The ladder: bool below everything; same-kind pairs take the wider width;
    an unsigned int mixed with a signed int promotes to the next wider signed
    type (uint64, having none, promotes to float64); any int mixed with any
    float gives float64. The result depends only on the operand set.
    """
    from .dtypes import DType as _D, ByteOrder as _BO

    if a.is_structured or b.is_structured:
        raise TypeError("structured dtypes do not combine arithmetically")
    if a == b:
        return a
    if a.kind is Kind.BOOL:
        return b
    if b.kind is Kind.BOOL:
        return a
    a_float = a.kind is Kind.FLOAT
    b_float = b.kind is Kind.FLOAT
    if a_float and b_float:
        return a if a.itemsize >= b.itemsize else b
    if a_float or b_float:
        return float64
    if a.kind == b.kind:
        return a if a.itemsize >= b.itemsize else b
    signed, unsigned = (a, b) if a.kind is Kind.SIGNED else (b, a)
    if unsigned.itemsize not in _SIGNED_FOR_UNSIGNED:
        return float64  # no wider signed type exists for uint64
    width = _SIGNED_FOR_UNSIGNED[unsigned.itemsize]
    as_signed = _D(Kind.SIGNED, width, _BO.LITTLE)
    return signed if signed.itemsize >= width else as_signed


def _require_numeric(dt: DType, what: str = "kernel") -> None:
    if not dt.is_numeric:
        raise TypeError(f"{what} requires a numeric dtype, got {dt}")


def _div_int(a: int, b: int) -> int:
    # Truncates toward zero, unlike Python's floor division.
    if b == 0:
        raise IntegerDivisionError("integer division by zero")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _div_float(a: float, b: float) -> float:
    a = float(a)
    b = float(b)
    if b == 0.0:
        if a != a or a == 0.0:
            return math.nan
        negative = (math.copysign(1.0, a) * math.copysign(1.0, b)) < 0
        return -math.inf if negative else math.inf
    return a / b


_BINARY_FN = {
    ("add", False): operator.add,
    ("sub", False): operator.sub,
    ("mul", False): operator.mul,
    ("div", False): _div_int,
    ("add", True): operator.add,
    ("sub", True): operator.sub,
    ("mul", True): operator.mul,
    ("div", True): _div_float,
}

_COMPARE_FN = {
    "ge": operator.ge,
    "gt": operator.gt,
    "le": operator.le,
    "lt": operator.lt,
    "eq": operator.eq,
    "ne": operator.ne,
}


def _binary_fn(op: str, out_dtype: DType):
    try:
        return _BINARY_FN[(op, out_dtype.kind is Kind.FLOAT)]
    except KeyError:
        raise ValueError(f"unknown binary op {op!r}") from None


def _cast_for(vals: list, src: DType, dst: DType) -> list:
    if dst.kind is Kind.FLOAT and src.kind is not Kind.FLOAT:
        return [float(v) for v in vals]
    return vals


def _gather_at(v: ArrayView, shape) -> list:
    return gather(v if v.shape == tuple(shape) else broadcast_view(v, shape))


def elementwise_binary(op: str, a: ArrayView, b: ArrayView) -> ArrayView:
    """Fresh array of the broadcast shape with op applied element-wise."""
    _require_numeric(a.dtype)
    _require_numeric(b.dtype)
    out_dtype = promote_dtypes(a.dtype, b.dtype)
    out_shape = broadcast_shapes(a.shape, b.shape)
    va = _cast_for(_gather_at(a, out_shape), a.dtype, out_dtype)
    vb = _cast_for(_gather_at(b, out_shape), b.dtype, out_dtype)
    fn = _binary_fn(op, out_dtype)
    out = create(out_shape, out_dtype)
    scatter(out, list(map(fn, va, vb)))
    record_scalar_ops(out.size)
    return out


def _scalar_operand(a_dtype: DType, s: Scalar) -> tuple[DType, Scalar]:
    # Float scalars behave as float64 operands; int scalars adopt the array's
    # dtype so 3*a on an integer array stays integral.
    if isinstance(s, bool):
        s = int(s)
    if isinstance(s, float):
        return promote_dtypes(a_dtype, float64), s
    if isinstance(s, int):
        return a_dtype, s
    raise TypeError(f"unsupported scalar operand {s!r}")


def scalar_binary(op: str, a: ArrayView, s: Scalar, scalar_side: str = "right") -> ArrayView:
    """Element-wise op between an array and a scalar (the scalar on either side).

    A fractional scalar against an integer array promotes the output to
    float64 rather than silently truncating.
    """
    _require_numeric(a.dtype)
    if scalar_side not in ("left", "right"):
        raise ValueError(f"scalar_side must be 'left' or 'right', got {scalar_side!r}")
    out_dtype, s = _scalar_operand(a.dtype, s)
    va = _cast_for(gather(a), a.dtype, out_dtype)
    if out_dtype.kind is Kind.FLOAT:
        s = float(s)
    fn = _binary_fn(op, out_dtype)
    if scalar_side == "left":
        vals = [fn(s, x) for x in va]
    else:
        vals = [fn(x, s) for x in va]
    out = create(a.shape, out_dtype)
    scatter(out, vals)
    record_scalar_ops(out.size)
    return out


def _sqrt(v) -> float:
    v = float(v)
    if v != v or v < 0.0:
        return math.nan
    return math.sqrt(v)


def elementwise_unary(op: str, a: ArrayView) -> ArrayView:
    """square, sqrt or neg over every element; sqrt of an int array yields float64."""
    _require_numeric(a.dtype)
    va = gather(a)
    if op == "square":
        out_dtype, vals = a.dtype, [v * v for v in va]
    elif op == "neg":
        out_dtype, vals = a.dtype, [-v for v in va]
    elif op == "sqrt":
        out_dtype = a.dtype if a.dtype.kind is Kind.FLOAT else float64
        vals = [_sqrt(v) for v in va]
    else:
        raise ValueError(f"unknown unary op {op!r}")
    out = create(a.shape, out_dtype)
    scatter(out, vals)
    record_scalar_ops(out.size)
    return out


def _reject_aliasing_strides(target: ArrayView) -> None:
    for ext, st in zip(target.shape, target.strides):
        if ext > 1 and st == 0:
            raise BroadcastError(
                "in-place target has a zero stride on an extent-"
                f"{ext} axis; writes would alias")


def elementwise_binary_inplace(op: str, target: ArrayView,
                               b: Union[ArrayView, Scalar]) -> None:
    """Apply op into target's own storage; allocates no buffers.

    The second operand broadcasts to the target's shape but may never expand
    it. Results are encoded back in the target's dtype; a fractional result
    against an integer target raises rather than truncating.
    """
    if not target.flags.writeable:
        raise NotWriteableError("in-place target is not writeable")
    _require_numeric(target.dtype)
    _reject_aliasing_strides(target)
    vt = gather(target)
    if isinstance(b, ArrayView):
        _require_numeric(b.dtype)
        if broadcast_shapes(target.shape, b.shape) != target.shape:
            raise ShapeError(
                f"in-place operand of shape {b.shape} would expand target "
                f"shape {target.shape}")
        domain = promote_dtypes(target.dtype, b.dtype)
        vb = _cast_for(_gather_at(b, target.shape), b.dtype, domain)
    else:
        domain, b = _scalar_operand(target.dtype, b)
        vb = None
    vt = _cast_for(vt, target.dtype, domain)
    fn = _binary_fn(op, domain)
    if vb is None:
        s = float(b) if domain.kind is Kind.FLOAT else b
        vals = [fn(x, s) for x in vt]
    else:
        vals = list(map(fn, vt, vb))
    scatter(target, vals)
    record_scalar_ops(target.size)


def compare(op: str, a: ArrayView, b: Union[ArrayView, Scalar]) -> ArrayView:
    """Element-wise comparison to a bool array of the broadcast shape."""
    if a.dtype.is_structured:
        raise TypeError("cannot compare structured elements")
    try:
        fn = _COMPARE_FN[op]
    except KeyError:
        raise ValueError(f"unknown comparison {op!r}") from None
    if isinstance(b, ArrayView):
        if b.dtype.is_structured:
            raise TypeError("cannot compare structured elements")
        out_shape = broadcast_shapes(a.shape, b.shape)
        va = _gather_at(a, out_shape)
        vb = _gather_at(b, out_shape)
        vals = list(map(fn, va, vb))
    else:
        out_shape = a.shape
        va = gather(a)
        vals = [fn(x, b) for x in va]
    out = create(out_shape, bool_)
    scatter(out, vals)
    record_scalar_ops(out.size)
    return out


def mask_select(a: ArrayView, mask: ArrayView) -> ArrayView:
    """Fresh array of a's rows where a 1-D bool mask is true, in order."""
    if mask.dtype.kind is not Kind.BOOL:
        raise TypeError(f"mask must be bool, got {mask.dtype}")
    if mask.ndim != 1:
        raise ShapeError(f"mask must be 1-D, got shape {mask.shape}")
    if a.ndim == 0:
        raise ShapeError("cannot mask a rank-0 view")
    if mask.shape[0] != a.shape[0]:
        raise ShapeError(
            f"mask length {mask.shape[0]} != leading extent {a.shape[0]}")
    keep = [i for i, m in enumerate(gather(mask)) if m]
    out = create((len(keep),) + a.shape[1:], a.dtype)
    for di, si in enumerate(keep):
        copy_elements(index_axis(a, 0, si), index_axis(out, 0, di))
    return out


def dot(a: ArrayView, b: ArrayView) -> ArrayView:
    """Naive triple-loop matrix product; always float64.

    1-D operands follow the standard promotion (a row vector on the left,
    a column vector on the right) and the inserted axes are dropped from the
    result. Counts 2*m*n*k scalar operations.
    """
    _require_numeric(a.dtype)
    _require_numeric(b.dtype)
    if a.ndim not in (1, 2) or b.ndim not in (1, 2):
        raise ShapeError(f"dot takes 1-D or 2-D operands, got ranks {a.ndim} and {b.ndim}")
    a2 = reshape(a, (1, a.shape[0])) if a.ndim == 1 else a
    b2 = reshape(b, (b.shape[0], 1)) if b.ndim == 1 else b
    m, ka = a2.shape
    kb, n = b2.shape
    if ka != kb:
        raise ShapeError(f"inner extents differ: {a2.shape} vs {b2.shape}")
    k = ka
    a_rows = [[float(x) for x in gather(index_axis(a2, 0, i))] for i in range(m)]
    b_rows = [[float(x) for x in gather(index_axis(b2, 0, t))] for t in range(k)]
    out = create((m, n), float64)
    vals: list = []
    for i in range(m):
        arow = a_rows[i]
        acc = [0.0] * n
        for t in range(k):
            at = arow[t]
            acc = [s + at * v for s, v in zip(acc, b_rows[t])]
        vals.extend(acc)
    scatter(out, vals)
    record_scalar_ops(2 * m * n * k)
    if a.ndim == 1 and b.ndim == 1:
        return reshape(out, ())
    if a.ndim == 1:
        return reshape(out, (n,))
    if b.ndim == 1:
        return reshape(out, (m,))
    return out


def field_view(a: ArrayView, name: str) -> ArrayView:
    """Zero-copy view of one field of a structured array.

    The strides still step whole records; only the base offset and dtype
    change, so nesting applies repeatedly.
    """
    offset, fdt = field_lookup(a.dtype, name)
    return ArrayView(a.buffer, a.base_offset + offset, a.shape, a.strides, fdt,
                     writeable=a.flags.writeable, is_view=True)
