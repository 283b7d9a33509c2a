"""
Configuration settings for the application
"""

from typing import Any, Dict


class Config:
    """Application configuration"""

    # Size guards
    MAX_EXTENSION_SIZE = 12  # input carrier of build_extension
    MAX_RANDOM_SIZE = 12
    MAX_GROUND_SIZE = 6  # powerset constructions, 2**6 elements
    ENUMERATION_BUDGET = 10 ** 7  # candidate maps |T|**|S|

    # Corpus defaults
    DEFAULT_SEED = 0
    DEFAULT_RANDOM_SIZE = 8

    # Named examples
    DEFAULT_TRUNCATION = 3
    GROUND_LABELS = "pqrstu"

    # Logging
    LOG_LEVEL = "WARNING"
    LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    @classmethod
    def validate_config(cls) -> Dict[str, Any]:
        """Validate configuration and return status"""
        warnings = []
        if cls.MAX_RANDOM_SIZE > cls.MAX_EXTENSION_SIZE:
            warnings.append("Random structures may exceed the extension ceiling")
        if len(cls.GROUND_LABELS) < cls.MAX_GROUND_SIZE:
            warnings.append("Not enough ground labels for the largest powerset")

        return {
            "valid": cls.ENUMERATION_BUDGET > 0 and cls.MAX_EXTENSION_SIZE > 0,
            "max_extension_size": cls.MAX_EXTENSION_SIZE,
            "enumeration_budget": cls.ENUMERATION_BUDGET,
            "warnings": warnings,
        }
