"""Array persistence and interop: memory-mapped files, raw record files, and
the foreign-memory array-interface protocol.

File format (bit-exact): packed little-endian element bytes in C-order, no
header, no padding; structured records are concatenated packed fields in
declaration order. Shape and dtype travel out-of-band. Because the in-memory
representation is identical, a mapped or loaded file needs no translation.

A mapped file must not be opened for writing by two views in the same
process; flush is not atomic across writers. Read-only mappings may be shared
freely.
"""

from __future__ import annotations

import ctypes
import mmap
import os
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence, Union

from .core import ArrayView, Backing, Buffer, contiguous_strides, iter_offsets
from .counters import record_allocation
from .dtypes import DType, parse_typestr
from .errors import MappingSizeError, RecordSizeError, ShapeError, StorageError

__all__ = [
    "MemmapMode",
    "ArrayInterfaceDescriptor",
    "memmap_open",
    "flush",
    "from_interface",
    "fromfile",
    "tofile",
]


class MemmapMode(Enum):
    """File-mapping modes, spelled like the mode strings they accept."""

    WRITE = "write"        # create or truncate, then read-write
    READ_WRITE = "r+"      # open existing, read-write
    READ_ONLY = "r"        # open existing, read-only

    @classmethod
    def coerce(cls, mode: Union["MemmapMode", str]) -> "MemmapMode":
        if isinstance(mode, cls):
            return mode
        try:
            return cls(mode)
        except ValueError:
            raise StorageError(
                f"unknown memmap mode {mode!r}; expected 'write', 'r+' or 'r'"
            ) from None


def memmap_open(path, mode: Union[MemmapMode, str], shape: Sequence[int],
                dtype: DType) -> ArrayView:
    """C-contiguous array over a file mapping.

    Write mode creates (or truncates) the file at exactly the array's byte
    size, zero-filled. The read modes require an existing file at least that
    large and map its leading bytes.
    """
    mode = MemmapMode.coerce(mode)
    shape = tuple(int(e) for e in shape)
    if any(e < 0 for e in shape):
        raise ShapeError(f"negative extent in shape {shape}")
    nbytes = dtype.itemsize
    for e in shape:
        nbytes *= e
    nbytes = nbytes if 0 not in shape else 0

    if mode is MemmapMode.WRITE:
        with open(path, "wb") as f:
            f.truncate(nbytes)
        if nbytes == 0:
            buf = Buffer(bytearray(0), Backing.FILE_MAPPED)
        else:
            f = open(path, "r+b")
            try:
                mm = mmap.mmap(f.fileno(), nbytes, access=mmap.ACCESS_WRITE)
            finally:
                f.close()
            buf = Buffer.from_mmap(mm, read_only=False)
    else:
        if not os.path.exists(path):
            raise FileNotFoundError(f"no such file: {path}")
        actual = os.path.getsize(path)
        if actual < nbytes:
            raise MappingSizeError(
                f"file {path} holds {actual} bytes, mapping needs {nbytes}")
        read_only = mode is MemmapMode.READ_ONLY
        if nbytes == 0:
            buf = Buffer(bytearray(0), Backing.FILE_MAPPED, read_only=read_only)
        else:
            access = mmap.ACCESS_READ if read_only else mmap.ACCESS_WRITE
            f = open(path, "rb" if read_only else "r+b")
            try:
                mm = mmap.mmap(f.fileno(), nbytes, access=access)
            finally:
                f.close()
            buf = Buffer.from_mmap(mm, read_only=read_only)
    return ArrayView(buf, 0, shape, contiguous_strides(shape, dtype.itemsize), dtype)


def flush(v: ArrayView) -> None:
    """Write pending modifications of a mapped array through to its file."""
    v.buffer.flush()


@dataclass(frozen=True)
class ArrayInterfaceDescriptor:
    """Foreign-memory exchange record.

    Field names mirror the wire protocol exactly: "shape", "data" (address,
    read-only flag), "typestr", optional "strides" (absent means
    C-contiguous). The declared bytes must stay valid at the address for the
    lifetime of every view created from the descriptor; the exporter's
    lifetime is the caller's responsibility.
    """

    shape: tuple[int, ...]
    data: tuple[int, bool]
    typestr: str
    strides: Optional[tuple[int, ...]] = None

    @classmethod
    def from_dict(cls, d: Mapping) -> "ArrayInterfaceDescriptor":
        try:
            shape = tuple(d["shape"])
            data = tuple(d["data"])
            typestr = d["typestr"]
        except KeyError as exc:
            raise StorageError(f"array-interface dict missing key {exc}") from None
        strides = d.get("strides")
        return cls(shape, (int(data[0]), bool(data[1])), typestr,
                   None if strides is None else tuple(strides))


def from_interface(source) -> ArrayView:
    """Zero-copy view over foreign memory described by an array interface.

    Accepts an ArrayInterfaceDescriptor, a protocol dict, or any object with
    an ``__array_interface__`` attribute; in the last case the exporting
    object is retained so the memory cannot be collected under the view.
    """
    owner = None
    if isinstance(source, ArrayInterfaceDescriptor):
        desc = source
    elif isinstance(source, Mapping):
        desc = ArrayInterfaceDescriptor.from_dict(source)
    elif hasattr(source, "__array_interface__"):
        owner = source
        desc = ArrayInterfaceDescriptor.from_dict(source.__array_interface__)
    else:
        raise StorageError(f"{type(source).__name__} does not expose an array interface")

    dtype = parse_typestr(desc.typestr)
    address, read_only = desc.data
    shape = tuple(int(e) for e in desc.shape)
    strides = desc.strides or contiguous_strides(shape, dtype.itemsize)
    if 0 in shape:
        lo, hi = 0, -dtype.itemsize
    else:
        lo = hi = 0
        for ext, st in zip(shape, strides):
            span = (ext - 1) * st
            if span < 0:
                lo += span
            else:
                hi += span
    nbytes = hi + dtype.itemsize - lo
    if address == 0 and nbytes > 0:
        raise StorageError("array interface has a null data location")

    if nbytes <= 0:
        raw = (ctypes.c_ubyte * 0)()
        nbytes = 0
    else:
        raw = (ctypes.c_ubyte * nbytes).from_address(address + lo)
    buf = Buffer.from_foreign(raw, read_only=read_only, owner=owner)
    return ArrayView(buf, -lo if nbytes else 0, shape, strides, dtype,
                     writeable=not read_only)


def fromfile(path, dtype: DType) -> ArrayView:
    """Eagerly read a raw record file into a fresh 1-D heap array."""
    with open(path, "rb") as f:
        data = f.read()
    count, remainder = divmod(len(data), dtype.itemsize)
    if remainder:
        raise RecordSizeError(
            f"file {path} holds {len(data)} bytes, {remainder} bytes short of "
            f"a whole {dtype.itemsize}-byte record boundary")
    raw = bytearray(data)
    record_allocation(len(raw))
    buf = Buffer(raw, Backing.HEAP)
    return ArrayView(buf, 0, (count,), (dtype.itemsize,), dtype)


def tofile(v: ArrayView, path) -> None:
    """Write a view's elements to a raw file in logical C-order.

    Non-contiguous views write their logical elements, not their raw buffer,
    so fromfile(tofile(v)) always reproduces v's values.
    """
    isz = v.itemsize
    with open(path, "wb") as f:
        if v.flags.c_contiguous and v.size:
            f.write(v.buffer.read_bytes(v.base_offset, v.base_offset + v.size * isz))
        else:
            for off in iter_offsets(v):
                f.write(v.buffer.read_bytes(off, off + isz))
