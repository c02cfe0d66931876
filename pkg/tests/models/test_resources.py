import pytest
from pydantic import ValidationError

from src.models.resources import AuditEntry, AuditReport, CostParams


class TestCostParams:
    """Test Toffoli cost parameters."""

    def test_lambda_alias(self):
        """Test lambda may be given by its document name."""
        params = CostParams.model_validate({"n": 4, "b": 8, "lambda": 2})
        assert params.lambda_ == 2
        assert params.lambda_prime == 1

    @pytest.mark.parametrize("value", [0, 3, 6])
    def test_lambda_must_be_power_of_two(self, value):
        """Test non powers of two are rejected."""
        with pytest.raises(ValidationError):
            CostParams(n=4, b=8, lambda_=value)


class TestAuditReport:
    """Test audit verdicts."""

    def test_mismatch_listing(self):
        """Test mismatches name the category and the difference."""
        report = AuditReport(formula_id="SDM", entries=[
            AuditEntry(category="rotations", expected=63, measured=63),
            AuditEntry(category="two_qubit_cliffords", expected=19, measured=21),
        ])
        assert not report.passed
        assert report.mismatches() == ["two_qubit_cliffords: expected 19, measured 21 (SDM, delta +2)"]
