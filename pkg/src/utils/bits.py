"""Bit helpers for Gray-code ordered multiplexer layouts."""


def gray(i: int) -> int:
    return i ^ (i >> 1)


def trailing_zeros(i: int) -> int:
    """Index of the lowest set bit of a positive integer."""
    if i <= 0:
        raise ValueError("trailing_zeros needs a positive integer")
    return (i & -i).bit_length() - 1


def popcount(i: int) -> int:
    return bin(i).count("1")


def ruler_sequence(length: int) -> list:
    """tz(1), tz(2), ..., tz(length): the bit flipped by each Gray-code step."""
    return [trailing_zeros(t) for t in range(1, length + 1)]
