"""Security verdict for a BB84 link."""

from enum import Enum


class SecurityVerdict(str, Enum):
    """Which attack class a given QBER is still secure against."""

    SECURE_SOPHISTICATED = "secure-sophisticated"
    """QBER at or below 10%."""

    SECURE_INTERCEPT_RESEND = "secure-intercept-resend"
    """QBER at or below 25%."""

    INSECURE = "insecure"

    def __str__(self) -> str:
        """Return the verdict value as a string."""
        return self.value
