"""Buffer-and-header core: byte storage, element addressing, zero-copy views.

Every array is an ArrayView: a small immutable header (base offset, shape,
signed byte strides, dtype, flags) over a shared Buffer. Slicing, transposing,
reshaping contiguous data and dtype reinterpretation all produce new headers
over the same bytes; writes through any view are visible through every other
view of the same buffer.

Threading contract: views may move freely between threads and concurrent
reads of a shared buffer are safe. The library does not synchronize writers;
concurrent mutation of a buffer requires external exclusivity.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from struct import error as _struct_error
from typing import Iterator, Sequence, Union

from .counters import record_allocation
from .dtypes import DType, decode_element, element_struct, encode_element, int64
from .errors import (
    AllocationError,
    BoundsError,
    NotWriteableError,
    ReinterpretError,
    ShapeError,
    StorageError,
)

__all__ = [
    "Backing",
    "Buffer",
    "Flags",
    "ArrayView",
    "contiguous_strides",
    "fortran_strides",
    "create",
    "arange",
    "array_from",
    "element_offset",
    "get_element",
    "set_element",
    "slice_view",
    "index_axis",
    "transpose",
    "reshape",
    "reinterpret_dtype",
    "fill_flat",
    "recompute_flags",
    "materialize",
    "copy_elements",
    "iter_offsets",
    "gather",
    "scatter",
]

Extents = tuple[int, ...]


class Backing(Enum):
    HEAP = "heap"
    FILE_MAPPED = "file-mapped"
    FOREIGN = "foreign"


_buffer_ids = itertools.count()


class Buffer:
    """A fixed-length contiguous byte store.

    `raw` is any object supporting the buffer protocol (bytearray, mmap,
    ctypes array); a cached memoryview serves byte-range reads and writes.
    Heap allocations report to the active counting scopes; mapped and foreign
    buffers wrap existing memory and are never counted as allocations.
    """

    __slots__ = ("raw", "backing", "read_only", "id", "owner", "_mmap", "_view")

    def __init__(self, raw, backing: Backing, read_only: bool = False,
                 owner=None, mmap_handle=None):
        self.raw = raw
        self.backing = backing
        self.read_only = read_only
        self.id = next(_buffer_ids)
        self.owner = owner  # keepalive for foreign exporters / mapped files
        self._mmap = mmap_handle
        self._view = memoryview(raw) if raw is not None else memoryview(b"")

    def __del__(self):
        try:
            self._view.release()
        except Exception:
            pass

    @classmethod
    def allocate(cls, nbytes: int) -> "Buffer":
        """Fresh zero-filled heap buffer; counts toward the active tally."""
        if nbytes < 0:
            raise AllocationError(f"cannot allocate {nbytes} bytes")
        try:
            raw = bytearray(nbytes)
        except (MemoryError, OverflowError) as exc:
            raise AllocationError(f"allocation of {nbytes} bytes failed: {exc}") from None
        record_allocation(nbytes)
        return cls(raw, Backing.HEAP)

    @classmethod
    def from_mmap(cls, mm, read_only: bool) -> "Buffer":
        return cls(mm, Backing.FILE_MAPPED, read_only=read_only, mmap_handle=mm)

    @classmethod
    def from_foreign(cls, raw, read_only: bool, owner=None) -> "Buffer":
        return cls(raw, Backing.FOREIGN, read_only=read_only, owner=owner)

    @property
    def nbytes(self) -> int:
        return self._view.nbytes

    def read_bytes(self, start: int, stop: int) -> bytes:
        return bytes(self._view[start:stop])

    def write_bytes(self, start: int, data) -> None:
        if self.read_only:
            raise NotWriteableError("buffer is read-only")
        self._view[start:start + len(data)] = data

    def flush(self) -> None:
        """Make pending modifications durable; only valid for mapped files."""
        if self.backing is not Backing.FILE_MAPPED:
            raise StorageError(f"flush on {self.backing.value} buffer")
        if self._mmap is not None:
            self._mmap.flush()


@dataclass(frozen=True)
class Flags:
    writeable: bool
    c_contiguous: bool
    f_contiguous: bool
    is_view: bool


def contiguous_strides(shape: Sequence[int], itemsize: int) -> Extents:
    """Row-major packed strides: last axis steps one element."""
    strides = [0] * len(shape)
    acc = itemsize
    for k in range(len(shape) - 1, -1, -1):
        strides[k] = acc
        acc *= shape[k]
    return tuple(strides)


def fortran_strides(shape: Sequence[int], itemsize: int) -> Extents:
    """Column-major analogue of contiguous_strides."""
    strides = [0] * len(shape)
    acc = itemsize
    for k in range(len(shape)):
        strides[k] = acc
        acc *= shape[k]
    return tuple(strides)


def _contiguity(shape: Extents, strides: Extents, itemsize: int) -> tuple[bool, bool]:
    # Extent-1 axes place no constraint on strides; empty arrays count as both.
    if 0 in shape:
        return True, True
    c = f = True
    acc = itemsize
    for ext, st in zip(reversed(shape), reversed(strides)):
        if ext != 1 and st != acc:
            c = False
        acc *= ext
    acc = itemsize
    for ext, st in zip(shape, strides):
        if ext != 1 and st != acc:
            f = False
        acc *= ext
    return c, f


class ArrayView:
    """Array header: a dtype-aware window onto a Buffer.

    Headers are immutable; mutation happens only through the buffer via
    set_element / scatter / kernels. Construction validates that every
    addressable element lies inside the buffer.
    """

    __slots__ = ("buffer", "base_offset", "shape", "strides", "dtype", "flags")

    def __init__(self, buffer: Buffer, base_offset: int, shape: Sequence[int],
                 strides: Sequence[int], dtype: DType, *,
                 writeable: bool = True, is_view: bool = False):
        shape = tuple(int(e) for e in shape)
        strides = tuple(int(s) for s in strides)
        if len(shape) != len(strides):
            raise ShapeError(f"rank mismatch: shape {shape} vs strides {strides}")
        if any(e < 0 for e in shape):
            raise ShapeError(f"negative extent in shape {shape}")
        if 0 not in shape:
            lo = hi = base_offset
            for ext, st in zip(shape, strides):
                span = (ext - 1) * st
                if span < 0:
                    lo += span
                else:
                    hi += span
            if lo < 0 or hi > buffer.nbytes - dtype.itemsize:
                raise BoundsError(
                    f"view spans bytes [{lo}, {hi + dtype.itemsize}) outside "
                    f"buffer of {buffer.nbytes} bytes"
                )
        object.__setattr__(self, "buffer", buffer)
        object.__setattr__(self, "base_offset", base_offset)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "strides", strides)
        object.__setattr__(self, "dtype", dtype)
        c, f = _contiguity(shape, strides, dtype.itemsize)
        flags = Flags(writeable=bool(writeable) and not buffer.read_only,
                      c_contiguous=c, f_contiguous=f, is_view=is_view)
        object.__setattr__(self, "flags", flags)

    def __setattr__(self, name, value):
        raise AttributeError("ArrayView headers are immutable")

    # -- basic properties ---------------------------------------------------

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    @property
    def itemsize(self) -> int:
        return self.dtype.itemsize

    @property
    def T(self) -> "ArrayView":
        return transpose(self)

    def tolist(self):
        """Values as nested Python lists (a scalar for rank-0 views)."""
        if not self.shape:
            return get_element(self, ())
        if self.ndim == 1:
            return gather(self)
        return [index_axis(self, 0, i).tolist() for i in range(self.shape[0])]

    def __repr__(self) -> str:
        return (f"ArrayView(shape={self.shape}, strides={self.strides}, "
                f"dtype={self.dtype}, offset={self.base_offset}, "
                f"writeable={self.flags.writeable})")

    # -- indexing sugar -----------------------------------------------------

    def __getitem__(self, key):
        from . import broadcast as _bc
        from . import kernels as _k
        if isinstance(key, str):
            return _k.field_view(self, key)
        if isinstance(key, ArrayView):
            return _k.mask_select(self, key)
        items = key if isinstance(key, tuple) else (key,)
        if sum(1 for it in items if it is not None) > self.ndim:
            raise BoundsError(f"too many indices for rank-{self.ndim} view")
        if len(items) == self.ndim and all(isinstance(it, int) for it in items):
            return get_element(self, self._normalize_index(items))
        view, axis = self, 0
        for it in items:
            if it is None:
                view = _bc.newaxis_view(view, axis)
                axis += 1
            elif isinstance(it, slice):
                spec = [slice(None)] * axis + [it]
                view = slice_view(view, spec)
                axis += 1
            elif isinstance(it, int):
                ext = view.shape[axis]
                i = it + ext if it < 0 else it
                view = index_axis(view, axis, i)
            else:
                raise TypeError(f"unsupported index {it!r}")
        return view

    def __setitem__(self, key, value):
        items = key if isinstance(key, tuple) else (key,)
        if (not isinstance(key, str) and len(items) == self.ndim
                and all(isinstance(it, int) for it in items)):
            set_element(self, self._normalize_index(items), value)
            return
        target = self[key]
        if isinstance(value, ArrayView):
            if (value.buffer is target.buffer
                    and value.base_offset == target.base_offset
                    and value.shape == target.shape
                    and value.strides == target.strides):
                return  # augmented assignment already mutated in place
            if value.dtype != target.dtype:
                raise TypeError(f"cannot assign {value.dtype} values into {target.dtype}")
            from .broadcast import broadcast_view
            copy_elements(broadcast_view(value, target.shape), target)
        else:
            scatter(target, [value] * target.size)

    def _normalize_index(self, items) -> Extents:
        idx = []
        for k, it in enumerate(items):
            i = it + self.shape[k] if it < 0 else it
            idx.append(i)
        return tuple(idx)

    # -- arithmetic sugar (thin wrappers over the kernel module) -------------

    def _binary(self, other, op, scalar_side):
        from . import kernels as _k
        if isinstance(other, ArrayView):
            return _k.elementwise_binary(op, self, other) if scalar_side == "right" \
                else _k.elementwise_binary(op, other, self)
        return _k.scalar_binary(op, self, other, scalar_side=scalar_side)

    def __add__(self, other):
        return self._binary(other, "add", "right")

    def __radd__(self, other):
        return self._binary(other, "add", "left")

    def __sub__(self, other):
        return self._binary(other, "sub", "right")

    def __rsub__(self, other):
        return self._binary(other, "sub", "left")

    def __mul__(self, other):
        return self._binary(other, "mul", "right")

    def __rmul__(self, other):
        return self._binary(other, "mul", "left")

    def __truediv__(self, other):
        return self._binary(other, "div", "right")

    def __rtruediv__(self, other):
        return self._binary(other, "div", "left")

    def __neg__(self):
        from . import kernels as _k
        return _k.elementwise_unary("neg", self)

    def _inplace(self, other, op):
        from . import kernels as _k
        _k.elementwise_binary_inplace(op, self, other)
        return self

    def __iadd__(self, other):
        return self._inplace(other, "add")

    def __isub__(self, other):
        return self._inplace(other, "sub")

    def __imul__(self, other):
        return self._inplace(other, "mul")

    def __itruediv__(self, other):
        return self._inplace(other, "div")

    def _compare(self, other, op):
        from . import kernels as _k
        return _k.compare(op, self, other)

    def __ge__(self, other):
        return self._compare(other, "ge")

    def __gt__(self, other):
        return self._compare(other, "gt")

    def __le__(self, other):
        return self._compare(other, "le")

    def __lt__(self, other):
        return self._compare(other, "lt")

    # __eq__ stays identity so views remain usable in sets and dicts;
    # elementwise equality is kernels.compare("eq", ...).


# ---------------------------------------------------------------------------
# Constructors


def create(shape: Sequence[int], dtype: DType) -> ArrayView:
    """Fresh zero-filled C-contiguous heap array."""
    shape = tuple(int(e) for e in shape)
    if any(e < 0 for e in shape):
        raise ShapeError(f"negative extent in shape {shape}")
    nbytes = math.prod(shape) * dtype.itemsize
    buf = Buffer.allocate(nbytes)
    return ArrayView(buf, 0, shape, contiguous_strides(shape, dtype.itemsize), dtype)


def arange(start, stop=None, step=1, dtype: DType = int64) -> ArrayView:
    """1-D array of values start, start+step, ... below stop (above, for step<0)."""
    if stop is None:
        start, stop = 0, start
    if step == 0:
        raise ValueError("arange step cannot be zero")
    if all(isinstance(v, int) for v in (start, stop, step)):
        count = max(0, -((start - stop) // step) if step > 0 else -((stop - start) // -step))
        values = [start + i * step for i in range(count)]
    else:
        count = max(0, math.ceil((stop - start) / step))
        values = [start + i * step for i in range(count)]
    out = create((count,), dtype)
    if count:
        element_struct(dtype, count).pack_into(out.buffer.raw, 0, *values)
    return out


def array_from(values, dtype: DType) -> ArrayView:
    """Array from nested Python lists; shape inferred from list nesting.

    Only lists nest; tuples and dicts are taken as element values, so a list
    of tuples builds a 1-D structured array.
    """
    shape = []
    probe = values
    while isinstance(probe, list):
        shape.append(len(probe))
        probe = probe[0] if probe else None
    out = create(tuple(shape), dtype)

    def flatten(v, depth):
        if depth == len(shape):
            yield v
        else:
            if len(v) != shape[depth]:
                raise ShapeError("ragged nested list")
            for item in v:
                yield from flatten(item, depth + 1)

    scatter(out, list(flatten(values, 0)))
    return out


# ---------------------------------------------------------------------------
# Addressing and element access


def element_offset(v: ArrayView, idx: Sequence[int]) -> int:
    """Byte offset of the element at an index vector."""
    if len(idx) != v.ndim:
        raise BoundsError(f"index {tuple(idx)} has {len(idx)} axes, view has {v.ndim}")
    off = v.base_offset
    for k, (i, ext, st) in enumerate(zip(idx, v.shape, v.strides)):
        if not 0 <= i < ext:
            raise BoundsError(f"index {i} out of bounds for axis {k} with extent {ext}")
        off += i * st
    return off


def get_element(v: ArrayView, idx: Sequence[int]):
    """Decode the element at idx: a Python scalar, or a field-name dict for records."""
    return decode_element(v.dtype, v.buffer.raw, element_offset(v, idx))


def set_element(v: ArrayView, idx: Sequence[int], value) -> None:
    """Encode a value at idx; requires a writeable view."""
    off = element_offset(v, idx)
    if not v.flags.writeable:
        raise NotWriteableError("view is not writeable")
    encode_element(v.dtype, v.buffer.raw, off, value)


# ---------------------------------------------------------------------------
# View transformations (all zero-copy unless stated)

SliceLike = Union[slice, tuple]


def _as_slice(item: SliceLike) -> slice:
    if isinstance(item, slice):
        return item
    start, stop, step = (tuple(item) + (None,) * 3)[:3]
    return slice(start, stop, step)


def slice_view(v: ArrayView, spec: Sequence[SliceLike]) -> ArrayView:
    """Per-axis start:stop:step selection; missing trailing axes pass through whole.

    Bounds follow the half-open convention: negative indices count from the
    end, out-of-range bounds clamp, and a negative step walks backward with
    the base offset moved to the last selected element.
    """
    if len(spec) > v.ndim:
        raise ShapeError(f"slice spec has {len(spec)} axes, view has {v.ndim}")
    offset = v.base_offset
    shape = list(v.shape)
    strides = list(v.strides)
    for k, item in enumerate(spec):
        sl = _as_slice(item)
        if sl.step == 0:
            raise ValueError(f"slice step is zero on axis {k}")
        start, stop, step = sl.indices(v.shape[k])
        count = len(range(start, stop, step))
        if count > 0:
            offset += start * v.strides[k]
        shape[k] = count
        strides[k] = v.strides[k] * step
    return ArrayView(v.buffer, offset, shape, strides, v.dtype,
                     writeable=v.flags.writeable, is_view=True)


def index_axis(v: ArrayView, axis: int, i: int) -> ArrayView:
    """Select one position along an axis, dropping that axis (zero-copy)."""
    if not 0 <= axis < v.ndim:
        raise BoundsError(f"axis {axis} out of range for rank {v.ndim}")
    if not 0 <= i < v.shape[axis]:
        raise BoundsError(
            f"index {i} out of bounds for axis {axis} with extent {v.shape[axis]}")
    shape = v.shape[:axis] + v.shape[axis + 1:]
    strides = v.strides[:axis] + v.strides[axis + 1:]
    return ArrayView(v.buffer, v.base_offset + i * v.strides[axis], shape, strides,
                     v.dtype, writeable=v.flags.writeable, is_view=True)


def transpose(v: ArrayView) -> ArrayView:
    """Reverse shape and strides; same buffer."""
    return ArrayView(v.buffer, v.base_offset, v.shape[::-1], v.strides[::-1],
                     v.dtype, writeable=v.flags.writeable, is_view=True)


def reshape(v: ArrayView, new_shape: Sequence[int]) -> ArrayView:
    """Same elements in C-order under a new shape.

    Zero-copy when the view is C-contiguous; otherwise the elements are
    copied into a fresh contiguous buffer (the result's is_view flag records
    which path ran).
    """
    new_shape = tuple(int(e) for e in new_shape)
    if any(e < 0 for e in new_shape):
        raise ShapeError(f"negative extent in shape {new_shape}")
    if math.prod(new_shape) != v.size:
        raise ShapeError(
            f"cannot reshape {v.size} elements into shape {new_shape} "
            f"({math.prod(new_shape)} elements)")
    if v.flags.c_contiguous:
        return ArrayView(v.buffer, v.base_offset, new_shape,
                         contiguous_strides(new_shape, v.itemsize), v.dtype,
                         writeable=v.flags.writeable, is_view=True)
    out = create(new_shape, v.dtype)
    copy_elements(v, out)
    return out


def reinterpret_dtype(v: ArrayView, new_dtype: DType) -> ArrayView:
    """View the same bytes under a different element type (zero-copy).

    The last axis must be element-contiguous and its byte span divisible by
    the new itemsize; only the last extent and stride change.
    """
    if v.ndim == 0:
        raise ReinterpretError("rank-0 view has no last axis to reinterpret")
    old = v.dtype.itemsize
    if v.strides[-1] != old:
        raise ReinterpretError(
            f"last axis not contiguous: stride {v.strides[-1]} != itemsize {old}")
    span = v.shape[-1] * old
    new = new_dtype.itemsize
    if span % new != 0:
        raise ReinterpretError(
            f"last-axis span of {span} bytes is not divisible by new itemsize {new}")
    shape = v.shape[:-1] + (span // new,)
    strides = v.strides[:-1] + (new,)
    return ArrayView(v.buffer, v.base_offset, shape, strides, new_dtype,
                     writeable=v.flags.writeable, is_view=True)


def recompute_flags(v: ArrayView) -> Flags:
    """Contiguity flags derived afresh from shape, strides and itemsize."""
    c, f = _contiguity(v.shape, v.strides, v.itemsize)
    return Flags(writeable=v.flags.writeable, c_contiguous=c, f_contiguous=f,
                 is_view=v.flags.is_view)


# ---------------------------------------------------------------------------
# Bulk element traffic


def _row_starts(shape: Extents, strides: Extents, base: int) -> Iterator[int]:
    # Offsets of each last-axis run, C-order; caller guarantees no zero extents.
    lead = shape[:-1]
    if not lead:
        yield base
        return
    lead_strides = strides[:-1]
    idx = [0] * len(lead)
    off = base
    while True:
        yield off
        k = len(lead) - 1
        while k >= 0:
            idx[k] += 1
            off += lead_strides[k]
            if idx[k] < lead[k]:
                break
            off -= lead_strides[k] * lead[k]
            idx[k] = 0
            k -= 1
        if k < 0:
            return


def iter_offsets(v: ArrayView) -> Iterator[int]:
    """Byte offsets of every element in C-order."""
    if v.size == 0:
        return
    if not v.shape:
        yield v.base_offset
        return
    n, s = v.shape[-1], v.strides[-1]
    for row in _row_starts(v.shape, v.strides, v.base_offset):
        off = row
        for _ in range(n):
            yield off
            off += s


def gather(v: ArrayView) -> list:
    """All element values in C-order as a flat list.

    Runs of element-contiguous bytes decode in bulk; any other stride
    pattern (including zero strides from broadcasting) falls back to
    per-element decoding.
    """
    if v.dtype.is_structured:
        return [decode_element(v.dtype, v.buffer.raw, off) for off in iter_offsets(v)]
    if v.size == 0:
        return []
    raw = v.buffer.raw
    if not v.shape:
        return [element_struct(v.dtype).unpack_from(raw, v.base_offset)[0]]
    n, s = v.shape[-1], v.strides[-1]
    out: list = []
    if s == v.itemsize and n > 0:
        st = element_struct(v.dtype, n)
        for row in _row_starts(v.shape, v.strides, v.base_offset):
            out.extend(st.unpack_from(raw, row))
    else:
        unpack = element_struct(v.dtype).unpack_from
        for row in _row_starts(v.shape, v.strides, v.base_offset):
            out.extend(unpack(raw, row + i * s)[0] for i in range(n))
    return out


def scatter(v: ArrayView, values: Sequence) -> None:
    """Assign a flat C-order value sequence into the view's elements."""
    if not v.flags.writeable:
        raise NotWriteableError("view is not writeable")
    if len(values) != v.size:
        raise ShapeError(f"{len(values)} values for {v.size} elements")
    if v.size == 0:
        return
    raw = v.buffer.raw
    if v.dtype.is_structured:
        for off, val in zip(iter_offsets(v), values):
            encode_element(v.dtype, raw, off, val)
        return
    if not v.shape:
        encode_element(v.dtype, raw, v.base_offset, values[0])
        return
    n, s = v.shape[-1], v.strides[-1]
    if s == v.itemsize and n > 0:
        st = element_struct(v.dtype, n)
        pos = 0
        for row in _row_starts(v.shape, v.strides, v.base_offset):
            try:
                st.pack_into(raw, row, *values[pos:pos + n])
            except _struct_error:
                # re-encode one by one so the error names the bad value
                for i in range(n):
                    encode_element(v.dtype, raw, row + i * s, values[pos + i])
            pos += n
    else:
        pos = 0
        for row in _row_starts(v.shape, v.strides, v.base_offset):
            for i in range(n):
                encode_element(v.dtype, raw, row + i * s, values[pos])
                pos += 1


def fill_flat(v: ArrayView, values) -> None:
    """Assign a 1-D source to the view in C-order, regardless of its strides."""
    if isinstance(values, ArrayView):
        if values.ndim != 1:
            raise ShapeError("fill_flat source must be 1-D")
        values = gather(values)
    else:
        values = list(values)
    if len(values) != v.size:
        raise ShapeError(f"source has {len(values)} values, view has {v.size} elements")
    scatter(v, values)


def copy_elements(src: ArrayView, dst: ArrayView) -> None:
    """Raw byte copy of src's elements into dst, both in C-order.

    Dtypes must carry the same itemsize; element counts must match. Overlapping
    source and destination regions are not supported.
    """
    if src.size != dst.size:
        raise ShapeError(f"element count mismatch: {src.size} vs {dst.size}")
    if src.itemsize != dst.itemsize:
        raise ShapeError(f"itemsize mismatch: {src.itemsize} vs {dst.itemsize}")
    if not dst.flags.writeable:
        raise NotWriteableError("destination view is not writeable")
    if src.size == 0:
        return
    isz = src.itemsize
    if src.flags.c_contiguous and dst.flags.c_contiguous:
        nbytes = src.size * isz
        dst.buffer.write_bytes(
            dst.base_offset,
            src.buffer.read_bytes(src.base_offset, src.base_offset + nbytes))
        return
    sview = memoryview(src.buffer.raw)
    dview = memoryview(dst.buffer.raw)
    try:
        for so, do in zip(iter_offsets(src), iter_offsets(dst)):
            dview[do:do + isz] = sview[so:so + isz]
    finally:
        sview.release()
        dview.release()


def materialize(v: ArrayView) -> ArrayView:
    """Dense C-contiguous heap copy of a view (one fresh allocation)."""
    out = create(v.shape, v.dtype)
    copy_elements(v, out)
    return out
