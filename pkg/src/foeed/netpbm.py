"""Binary PGM (P5) and PPM (P6) reading and writing, 8 bit only."""
import os
import tempfile

import numpy as np

_WS = b" \t\n\r\v\f"


class NetpbmError(ValueError):
    pass


def _tokens(data, count):
    """First ``count`` header tokens and the offset of the raster."""
    out = []
    pos = 0
    n = len(data)
    while len(out) < count:
        while pos < n and data[pos] in _WS:
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < n and data[pos] not in _WS and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise NetpbmError("truncated header")
        out.append(data[start:pos])
    if pos >= n or data[pos] not in _WS:
        raise NetpbmError("missing whitespace after header")
    return out, pos + 1


def decode(data):
    """Decode P5/P6 bytes to a uint8 array of shape ``(h, w)`` or ``(h, w, 3)``."""
    if data[:2] not in (b"P5", b"P6"):
        raise NetpbmError(f"unsupported magic {data[:2]!r}; only P5 and P6 are read")
    (magic, w, h, maxval), offset = _tokens(data, 4)
    try:
        w, h, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise NetpbmError("non-numeric header field") from exc
    if maxval != 255:
        raise NetpbmError(f"only maxval 255 is supported, got {maxval}")
    channels = 3 if magic == b"P6" else 1
    size = w * h * channels
    raster = data[offset:offset + size]
    if len(raster) != size:
        raise NetpbmError(f"raster has {len(raster)} bytes, expected {size}")
    a = np.frombuffer(raster, dtype=np.uint8)
    return a.reshape((h, w, 3) if channels == 3 else (h, w)).copy()


def encode(a):
    a = np.asarray(a)
    if a.dtype != np.uint8:
        raise NetpbmError(f"expected uint8 pixels, got {a.dtype}")
    if a.ndim == 2:
        magic = b"P5"
    elif a.ndim == 3 and a.shape[2] == 3:
        magic = b"P6"
    else:
        raise NetpbmError(f"cannot encode array of shape {a.shape}")
    h, w = a.shape[:2]
    return magic + b"\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(a).tobytes()


def read(path):
    with open(path, "rb") as fh:
        return decode(fh.read())


def write(path, a):
    """Write atomically: encode into a temporary sibling, then rename."""
    write_bytes(path, encode(a))


def write_bytes(path, data):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def quantize(u):
    """Round half away from zero and clamp to [0, 255]."""
    u = np.asarray(u, dtype=float)
    r = np.sign(u) * np.floor(np.abs(u) + 0.5)
    return np.clip(r, 0, 255).astype(np.uint8)
