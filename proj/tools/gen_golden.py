#!/usr/bin/env python3
"""Regenerate the golden-vector suites under tests/golden/.

lines/   64-byte cache lines with the expected line-codec encoding, computed by
         an independent scheme evaluator written here (not the C++ codec).
lz4/     LZ4 block payloads produced by the reference LZ4 library
         (python-lz4, lz4.block.compress with store_size=False).

Usage: python3 tools/gen_golden.py [--out tests/golden]
Requires: pip install lz4
"""

import argparse
import os
import random
import struct

import lz4.block

MASK64 = (1 << 64) - 1


class Xoshiro256ss:
    """xoshiro256** seeded through splitmix64, mirroring include/cxltier/rng.hpp."""

    def __init__(self, seed):
        x = seed & MASK64
        self.s = []
        for _ in range(4):
            x = (x + 0x9E3779B97F4A7C15) & MASK64
            z = x
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
            self.s.append(z ^ (z >> 31))

    @staticmethod
    def _rotl(x, k):
        return ((x << k) | (x >> (64 - k))) & MASK64

    def next(self):
        s = self.s
        result = (self._rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = self._rotl(s[3], 45)
        return result

    def bytes(self, n):
        out = bytearray()
        while len(out) < n:
            out += struct.pack("<Q", self.next())
        return bytes(out[:n])


# Scheme table: name -> (base width, delta width, payload size)
ORDER = ["Z", "R", "B8D1", "B4D1", "B8D2", "B8D4", "RAW"]
PAYLOAD = {"Z": 0, "R": 8, "B8D1": 16, "B4D1": 24, "B8D2": 24, "B8D4": 40, "RAW": 64}
BASE_DELTA = {"B8D1": (8, 1), "B4D1": (4, 1), "B8D2": (8, 2), "B8D4": (8, 4)}


def signed_words(line, width):
    fmt = {4: "<i", 8: "<q"}[width]
    return [struct.unpack_from(fmt, line, i)[0] for i in range(0, 64, width)]


def encode(line):
    """Exhaustive evaluation: every applicable scheme, pick smallest payload, order tie-break."""
    candidates = []
    if line == bytes(64):
        candidates.append(("Z", b""))
    if all(line[i:i + 8] == line[0:8] for i in range(0, 64, 8)):
        candidates.append(("R", line[0:8]))
    for name, (bw, dw) in BASE_DELTA.items():
        words = signed_words(line, bw)
        base = words[0]
        deltas = [w - base for w in words]
        lo, hi = -(1 << (8 * dw - 1)), (1 << (8 * dw - 1)) - 1
        if all(lo <= d <= hi for d in deltas):
            fmt = {1: "<b", 2: "<h", 4: "<i"}[dw]
            payload = line[0:bw] + b"".join(struct.pack(fmt, d) for d in deltas)
            payload += bytes(PAYLOAD[name] - len(payload))
            candidates.append((name, payload))
    candidates.append(("RAW", line))
    candidates.sort(key=lambda c: (len(c[1]), ORDER.index(c[0])))
    name, payload = candidates[0]
    assert len(payload) == PAYLOAD[name]
    return name, payload


def size_class(n):
    return (n + 7) // 8 * 8


def words_line(values, width):
    fmt = {1: "<b", 2: "<h", 4: "<i", 8: "<q"}[width]
    return b"".join(struct.pack(fmt, v) for v in values)


def structured_lines():
    i64max, i64min = (1 << 63) - 1, -(1 << 63)
    i32max, i32min = (1 << 31) - 1, -(1 << 31)
    lines = [
        bytes(64),
        struct.pack("<Q", 7) * 8,
        words_line(range(1000, 1008), 8),
        Xoshiro256ss(42).bytes(64),
        b"\xff" * 64,
        b"A" * 64,
        words_line([5, 5, 5, 5, 5, 5, 5, 6], 8),
        words_line([0] * 7 + [127], 8),
        words_line([0] * 7 + [-128], 8),
        words_line([0] * 7 + [128], 8),
        words_line([0] * 7 + [-129], 8),
        words_line([0] * 7 + [32767], 8),
        words_line([0] * 7 + [-32768], 8),
        words_line([0] * 7 + [32768], 8),
        words_line([0] * 7 + [i32max], 8),
        words_line([0] * 7 + [i32min], 8),
        words_line([0] * 7 + [i32max + 1], 8),
        words_line([i64max] * 7 + [i64max - 1], 8),
        words_line([i64max] * 7 + [i64min], 8),
        words_line([i64min, i64min + 127, i64min, i64min, i64min, i64min, i64min, i64min], 8),
        words_line([i64min, i64max, 0, 0, 0, 0, 0, 0], 8),
        words_line([100 + (i % 7) for i in range(16)], 4),
        words_line([i32max - i for i in range(16)], 4),
        words_line([i32min + 100 * (i % 2) for i in range(16)], 4),
        words_line([0] * 15 + [128], 4),
        words_line([0x1000 + 3 * i for i in range(16)], 4),
        words_line([1 << 40, (1 << 40) + 30000, (1 << 40) - 30000] + [1 << 40] * 5, 8),
        words_line([1 << 40, (1 << 40) + 70000] + [1 << 40] * 6, 8),
        words_line([0, 1] * 8, 4),
        b"hello, world!\n" + bytes(50),
        bytes(63) + b"\x01",
        b"\x01" + bytes(63),
    ]
    return lines


def random_lines(count, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        kind = rng.randrange(6)
        if kind == 0:
            out.append(bytes(rng.getrandbits(8) for _ in range(64)))
        elif kind == 1:
            base = rng.randrange(-(1 << 63), 1 << 63)
            width = rng.choice([120, 130, 30000, 40000, 1 << 31, 1 << 33])
            vals = [max(-(1 << 63), min((1 << 63) - 1, base + rng.randint(-width, width))) for _ in range(8)]
            vals[0] = base
            out.append(words_line(vals, 8))
        elif kind == 2:
            base = rng.randrange(-(1 << 31), 1 << 31)
            vals = [max(-(1 << 31), min((1 << 31) - 1, base + rng.randint(-140, 140))) for _ in range(16)]
            vals[0] = base
            out.append(words_line(vals, 4))
        elif kind == 3:
            out.append(struct.pack("<q", rng.randrange(-(1 << 63), 1 << 63)) * 8)
        elif kind == 4:
            line = bytearray(64)
            for _ in range(rng.randint(1, 3)):
                line[rng.randrange(64)] = rng.getrandbits(8)
            out.append(bytes(line))
        else:
            out.append(bytes(rng.choice(b" etaoinshrdlu\n") for _ in range(64)))
    return out


def write_lines(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    lines = structured_lines() + random_lines(400, 2024)
    with open(os.path.join(out_dir, "lines.bin"), "wb") as f:
        for line in lines:
            f.write(line)
    with open(os.path.join(out_dir, "index.csv"), "w") as f:
        f.write("index,scheme,size_class,payload_hex\n")
        for i, line in enumerate(lines):
            name, payload = encode(line)
            f.write(f"{i},{name},{size_class(len(payload))},{payload.hex()}\n")
    return len(lines)


def lz4_inputs(seed):
    rng = random.Random(seed)
    words = b"alpha beta gamma delta epsilon memory tier cache line page block compress ".split()
    inputs = []
    for i in range(100):
        n = 4096 if i % 2 == 0 else 1024
        kind = i % 10
        if kind == 0:
            data = bytes(n)
        elif kind == 1:
            data = bytes(rng.getrandbits(8) for _ in range(n))
        elif kind == 2:
            data = b" ".join(rng.choice(words) for _ in range(n))[:n]
        elif kind == 3:
            data = b"".join(struct.pack("<I", 1000 + j * rng.randint(0, 3)) for j in range(n // 4))
        elif kind == 4:
            pat = bytes(rng.getrandbits(8) for _ in range(rng.randint(1, 40)))
            data = (pat * (n // len(pat) + 1))[:n]
        elif kind == 5:
            data = bytearray(n)
            for _ in range(rng.randint(1, 60)):
                data[rng.randrange(n)] = rng.getrandbits(8)
            data = bytes(data)
        elif kind == 6:
            half = bytes(rng.getrandbits(8) for _ in range(n // 2))
            data = half + bytes(n // 2)
        elif kind == 7:
            chunk = bytes(rng.getrandbits(8) for _ in range(64))
            data = b"".join(chunk if rng.random() < 0.5 else bytes(64) for _ in range(n // 64))
        elif kind == 8:
            data = b"".join(struct.pack("<d", rng.random() * 1000.0) for _ in range(n // 8))
        else:
            data = bytes((j * 7 + (j >> 5)) & 0xFF for j in range(n))
        assert len(data) == n
        inputs.append(data)
    return inputs


def write_lz4(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    for i, data in enumerate(lz4_inputs(7)):
        payload = lz4.block.compress(data, store_size=False)
        assert lz4.block.decompress(payload, uncompressed_size=len(data)) == data
        with open(os.path.join(out_dir, f"v{i:03d}.raw"), "wb") as f:
            f.write(data)
        with open(os.path.join(out_dir, f"v{i:03d}.lz4"), "wb") as f:
            f.write(payload)
        rows.append((f"v{i:03d}", len(data), len(payload)))
    with open(os.path.join(out_dir, "index.csv"), "w") as f:
        f.write(f"# reference lz4 {lz4.library_version_string()}\n")
        f.write("name,logical_len,compressed_len\n")
        for name, n, c in rows:
            f.write(f"{name},{n},{c}\n")
    return len(rows)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "tests", "golden"))
    args = parser.parse_args()
    n_lines = write_lines(os.path.join(args.out, "lines"))
    n_lz4 = write_lz4(os.path.join(args.out, "lz4"))
    print(f"wrote {n_lines} line vectors, {n_lz4} lz4 vectors")
    zeros = lz4.block.compress(bytes(4096), store_size=False)
    print(f"reference lz4 size of 4096 zero bytes: {len(zeros)}")
    prng = Xoshiro256ss(42)
    print("xoshiro256** seed 42 first outputs:", [hex(prng.next()) for _ in range(4)])
    print("seed-42 line encodes as:", encode(Xoshiro256ss(42).bytes(64))[0])
    print("1000..1007 encodes as:", encode(words_line(range(1000, 1008), 8)))
    page = Xoshiro256ss(42).bytes(4096)
    print("seed-42 page lines:", sorted(set(encode(page[i:i + 64])[0] for i in range(0, 4096, 64))))
    print("seed-42 page lz4 size:", len(lz4.block.compress(page, store_size=False)))


if __name__ == "__main__":
    main()
