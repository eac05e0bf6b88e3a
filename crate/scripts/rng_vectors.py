#!/usr/bin/env python3
"""Independent re-implementation of the stream generator and the geometry
draws used by the augmentation crates. Prints the test vectors and golden
rects that the Rust tests freeze."""

M64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


class Stream:
    def __init__(self, seed, stream_id):
        self.state = (seed ^ mix64(stream_id)) & M64

    def next_u64(self):
        self.state = (self.state + GAMMA) & M64
        return mix64(self.state)

    def next_f64(self):
        return (self.next_u64() >> 11) * 2.0 ** -53

    def int_in(self, lo, hi):
        span = hi - lo + 1
        if span == 1 << 64:
            return lo + self.next_u64()
        m = self.next_u64() * span
        low = m & M64
        if low < span:
            t = ((1 << 64) - span) % span
            while low < t:
                m = self.next_u64() * span
                low = m & M64
        return lo + (m >> 64)

    def real_in(self, lo, hi):
        return lo + (hi - lo) * self.next_f64()


def round_half_away(x):
    import math
    return math.floor(x + 0.5) if x >= 0 else -math.floor(-x + 0.5)


def side(rng, lo, hi, dim):
    return max(1, min(dim, round_half_away(rng.real_in(lo, hi) * dim)))


def cpm_rect(rng, w, h, lo, hi):
    rw = side(rng, lo, hi, w)
    rh = side(rng, lo, hi, h)
    x0 = rng.int_in(0, w - rw)
    y0 = rng.int_in(0, h - rh)
    return (x0, y0, rw, rh)


def spm_rect(rng, w, h, lo, hi, boxes, attempts=50):
    for _ in range(attempts):
        r = cpm_rect(rng, w, h, lo, hi)
        x0, y0, rw, rh = r
        if all(not (x0 < bx + bw and bx < x0 + rw and y0 < by + bh and by < y0 + rh)
               for bx, by, bw, bh in boxes):
            return r
    return None


if __name__ == "__main__":
    r = Stream(1234567, 0)
    print("splitmix64(1234567):", [r.next_u64() for _ in range(5)])
    r = Stream(42, 7)
    print("stream(42,7) u64:", [r.next_u64() for _ in range(3)])
    r = Stream(42, 7)
    print("stream(42,7) f64:", [r.next_f64() for _ in range(3)])
    r = Stream(42, 7)
    print("stream(42,7) int[0,9]:", [r.int_in(0, 9) for _ in range(8)])
    print("cpm rect seed 7, 128x128, [0.05,0.2]:", cpm_rect(Stream(7, 0), 128, 128, 0.05, 0.2))
    print("spm rect seed 42, 100x100, gt (0,0,50,100), [0.2,0.2]:",
          spm_rect(Stream(42, 0), 100, 100, 0.2, 0.2, [(0, 0, 50, 100)]))
