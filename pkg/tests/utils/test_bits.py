import pytest

from src.utils.bits import gray, popcount, ruler_sequence, trailing_zeros


class TestGrayCode:
    """Test Gray-code helpers."""

    def test_neighbours_differ_in_one_bit(self):
        """Test consecutive Gray codes differ in exactly the ruler bit."""
        for i in range(1, 64):
            changed = gray(i) ^ gray(i - 1)
            assert popcount(changed) == 1
            assert changed == 1 << trailing_zeros(i)

    def test_ruler_sequence(self):
        """Test the first ruler values."""
        assert ruler_sequence(7) == [0, 1, 0, 2, 0, 1, 0]

    def test_trailing_zeros_rejects_zero(self):
        """Test trailing_zeros needs a positive integer."""
        with pytest.raises(ValueError):
            trailing_zeros(0)
