"""Time-tag event streams: the data model shared by every other module.

A TagStream is a sorted sequence of (timestamp, channel) detection events
plus the acquisition metadata (tick resolution, total duration, declared
channel set) needed to normalize correlation estimates. Timestamps are
integer picoseconds; keeping them integral makes downstream histograms
bit-deterministic.

Binary container format ".ptt":
    header (30 bytes): magic b"PTAG" | version u16 LE (=1) |
        resolution_ps u64 LE | duration_ps u64 LE | channel_count u8 |
        7 reserved zero bytes
    records (9 bytes each): timestamp u64 LE in units of resolution_ps,
        then channel u8; nondecreasing in (timestamp, channel).

A CSV alternative ("t_ps,channel") is provided for debugging and interop.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Iterator, NamedTuple, Sequence, Union

import numpy as np

PTT_MAGIC = b"PTAG"
PTT_VERSION = 1
_HEADER = struct.Struct("<4sHQQB7x")
_RECORD_DTYPE = np.dtype([("t", "<u8"), ("ch", "u1")])

_MAX_T = np.iinfo(np.int64).max


class StreamError(ValueError):
    """Base class for malformed tag streams and stream files."""


class BadMagicError(StreamError):
    """File does not start with the PTAG magic."""


class UnsupportedVersionError(StreamError):
    """File declares a format version this reader does not understand."""


class TruncatedStreamError(StreamError):
    """Header or record payload is shorter than declared."""


class UnsortedTagsError(StreamError):
    """Tags are not sorted by (timestamp, channel)."""


class TagBeyondDurationError(StreamError):
    """A tag timestamp is at or past the declared stream duration."""


class ResolutionMismatchError(StreamError):
    """Two streams with different tick resolutions were combined."""


class TimeTag(NamedTuple):
    """One detection event: integer picoseconds and a detector channel."""

    t: int
    channel: int


def _as_int64(values, name: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.size and arr.dtype.kind == "u" and arr.max() > _MAX_T:
        raise StreamError(f"{name} exceeds the supported 63-bit range")
    out = arr.astype(np.int64, copy=False)
    return np.ascontiguousarray(out)


@dataclass(frozen=True)
class TagStream:
    """Immutable, time-sorted stream of detection events.

    Construction validates all invariants (sortedness, tags within
    duration, channels within the declared set); instances are safe to
    share across threads. ``provenance`` is advisory metadata (seeds,
    model descriptions); it is not serialized and is excluded from
    equality.
    """

    resolution: int
    duration: int
    channels: frozenset
    t: np.ndarray
    channel: np.ndarray
    provenance: tuple = ()

    def __init__(
        self,
        resolution: int,
        duration: int,
        channels: Iterable[int],
        t=(),
        channel=(),
        provenance: tuple = (),
        _validated: bool = False,
    ):
        object.__setattr__(self, "resolution", int(resolution))
        object.__setattr__(self, "duration", int(duration))
        object.__setattr__(self, "channels", frozenset(int(c) for c in channels))
        tt = _as_int64(t, "timestamp")
        ch = np.ascontiguousarray(np.asarray(channel, dtype=np.uint8))
        tt.flags.writeable = False
        ch.flags.writeable = False
        object.__setattr__(self, "t", tt)
        object.__setattr__(self, "channel", ch)
        object.__setattr__(self, "provenance", tuple(provenance))
        if not _validated:
            self._validate()

    def _validate(self) -> None:
        if self.resolution <= 0:
            raise StreamError("resolution must be a positive integer")
        if self.duration <= 0:
            raise StreamError("duration must be a positive integer")
        if self.t.shape != self.channel.shape:
            raise StreamError("timestamp and channel arrays differ in length")
        if any(not (0 <= c <= 255) for c in self.channels):
            raise StreamError("channel identifiers must fit in one byte")
        if self.t.size == 0:
            return
        if self.t[0] < 0:
            raise StreamError("negative timestamp")
        if self.t[-1] >= self.duration or int(self.t.max()) >= self.duration:
            raise TagBeyondDurationError("tag timestamp at or beyond stream duration")
        dt = np.diff(self.t)
        if np.any(dt < 0):
            raise UnsortedTagsError("timestamps decrease")
        ties = dt == 0
        if np.any(ties & (np.diff(self.channel.astype(np.int16)) < 0)):
            raise UnsortedTagsError("equal timestamps with decreasing channel")
        present = np.unique(self.channel)
        if not set(int(c) for c in present) <= self.channels:
            raise StreamError("tag channel not in declared channel set")

    def __len__(self) -> int:
        return self.t.size

    def __iter__(self) -> Iterator[TimeTag]:
        for t, c in zip(self.t.tolist(), self.channel.tolist()):
            yield TimeTag(t, c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TagStream):
            return NotImplemented
        return (
            self.resolution == other.resolution
            and self.duration == other.duration
            and self.channels == other.channels
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.channel, other.channel)
        )

    def __hash__(self):
        return hash((self.resolution, self.duration, self.channels, self.t.size))

    @property
    def tags(self) -> list:
        """Tags as a list of TimeTag (convenience; O(n) copies)."""
        return list(self)

    @classmethod
    def from_unsorted(
        cls,
        resolution: int,
        duration: int,
        channels: Iterable[int],
        t,
        channel,
        provenance: tuple = (),
    ) -> "TagStream":
        """Build a stream from unordered events, sorting by (t, channel)."""
        tt = _as_int64(t, "timestamp")
        ch = np.asarray(channel, dtype=np.uint8)
        order = np.lexsort((ch, tt))
        return cls(resolution, duration, channels, tt[order], ch[order], provenance)

    def select(self, channel: int) -> np.ndarray:
        """Sorted timestamps of one detector channel (int64 ps)."""
        if channel not in self.channels:
            raise StreamError(f"channel {channel} not declared in this stream")
        return self.t[self.channel == channel]

    def counts_by_channel(self) -> dict:
        return {c: int(np.count_nonzero(self.channel == c)) for c in sorted(self.channels)}

    def with_channels(self, channels: Iterable[int]) -> "TagStream":
        """Same tags under a wider (or relabeled-compatible) channel set."""
        return TagStream(self.resolution, self.duration, channels, self.t, self.channel, self.provenance)


def empty_stream(resolution: int = 1, duration: int = 1, channels: Iterable[int] = (0,)) -> TagStream:
    return TagStream(resolution, duration, channels, (), ())


def merge(a: TagStream, b: TagStream) -> TagStream:
    """Multiset union of two streams, re-sorted by (t, channel).

    Resolutions must match; the output duration is the max of the two
    (a shorter stream is implicitly padded with dead air). The sort is
    stable, so tags that tie on (t, channel) keep a-before-b order.
    """
    if a.resolution != b.resolution:
        raise ResolutionMismatchError(
            f"cannot merge streams with resolutions {a.resolution} and {b.resolution} ps"
        )
    t = np.concatenate([a.t, b.t])
    ch = np.concatenate([a.channel, b.channel])
    order = np.lexsort((ch, t))  # stable: primary t, secondary channel
    return TagStream(
        a.resolution,
        max(a.duration, b.duration),
        a.channels | b.channels,
        t[order],
        ch[order],
        a.provenance + b.provenance,
        _validated=False,
    )


def _channel_count(channels: frozenset) -> int:
    return (max(channels) + 1) if channels else 0


def write_stream(stream: TagStream, sink: Union[str, BinaryIO, None] = None) -> bytes:
    """Serialize a stream to .ptt bytes; optionally write them to a path or file.

    The header stores only the channel COUNT, so the declared channel set
    is canonicalized to {0 .. max(channels)} on disk; streams built by this
    package always use contiguous channel ids starting at 0.
    """
    count = _channel_count(stream.channels)
    if count > 255:
        raise StreamError("channel ids beyond 255 are not representable")
    if stream.t.size and np.any(stream.t % stream.resolution):
        raise StreamError("timestamps are not multiples of the stream resolution")
    header = _HEADER.pack(PTT_MAGIC, PTT_VERSION, stream.resolution, stream.duration, count)
    records = np.empty(stream.t.size, dtype=_RECORD_DTYPE)
    records["t"] = stream.t // stream.resolution
    records["ch"] = stream.channel
    payload = header + records.tobytes()
    if sink is not None:
        if isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__"):
            with open(sink, "wb") as fh:
                fh.write(payload)
        else:
            sink.write(payload)
    return payload


def read_stream(source: Union[str, bytes, BinaryIO]) -> TagStream:
    """Parse a .ptt byte source back into a validated TagStream."""
    if isinstance(source, bytes):
        data = source
    elif isinstance(source, (str,)) or hasattr(source, "__fspath__"):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
    if len(data) < _HEADER.size:
        if data[:4] != PTT_MAGIC and len(data) >= 4:
            raise BadMagicError("not a PTAG stream")
        raise TruncatedStreamError("file shorter than the fixed header")
    magic, version, resolution, duration, channel_count = _HEADER.unpack_from(data)
    if magic != PTT_MAGIC:
        raise BadMagicError("not a PTAG stream")
    if version != PTT_VERSION:
        raise UnsupportedVersionError(f"unsupported PTAG version {version}")
    body = data[_HEADER.size:]
    if len(body) % _RECORD_DTYPE.itemsize:
        raise TruncatedStreamError("record payload is not a whole number of 9-byte records")
    records = np.frombuffer(body, dtype=_RECORD_DTYPE)
    if resolution <= 0:
        raise StreamError("resolution must be positive")
    if duration > _MAX_T:
        raise StreamError("duration exceeds the supported 63-bit range")
    ticks = records["t"]
    if ticks.size and int(ticks.max()) > _MAX_T // resolution:
        raise TagBeyondDurationError("tick value overflows picosecond range")
    t = ticks.astype(np.int64) * resolution
    ch = records["ch"].copy()
    return TagStream(resolution, duration, range(channel_count), t, ch)


def write_stream_csv(stream: TagStream, sink: Union[str, io.TextIOBase, None] = None) -> str:
    """CSV alternative: header "t_ps,channel", one record per line."""
    lines = ["t_ps,channel"]
    lines.extend(f"{t},{c}" for t, c in zip(stream.t.tolist(), stream.channel.tolist()))
    text = "\n".join(lines) + "\n"
    if sink is not None:
        if isinstance(sink, str) or hasattr(sink, "__fspath__"):
            with open(sink, "w") as fh:
                fh.write(text)
        else:
            sink.write(text)
    return text


def read_stream_csv(
    source: Union[str, io.TextIOBase],
    resolution: int = 1,
    duration: Union[int, None] = None,
    channels: Union[Iterable[int], None] = None,
) -> TagStream:
    """Parse the CSV form. Duration defaults to last tag + 1 ps."""
    if isinstance(source, str) and "\n" not in source:
        with open(source) as fh:
            text = fh.read()
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "t_ps,channel":
        raise StreamError('CSV stream must start with header "t_ps,channel"')
    if len(lines) == 1:
        t = np.empty(0, np.int64)
        ch = np.empty(0, np.uint8)
    else:
        body = np.loadtxt(io.StringIO("\n".join(lines[1:])), delimiter=",", dtype=np.int64, ndmin=2)
        t, ch = body[:, 0], body[:, 1].astype(np.uint8)
    if duration is None:
        duration = int(t[-1]) + 1 if t.size else 1
    if channels is None:
        channels = range(int(ch.max()) + 1) if ch.size else (0,)
    return TagStream(resolution, duration, channels, t, ch)
