from configparser import ConfigParser, SectionProxy
from typing import Any, Dict, Optional

# Built-in configuration. No configuration files are read; the command line
# client overrides individual keys instead.
DEFAULT_CONFIG: Dict[str, Dict[str, str]] = {
    "executors.default": {
        "mode": "thread",
        "max_workers": "4",
    },
    "verify": {
        "seed": "0",
        "trials": "200000",
        "mc_seeds": "20",
        "oracle_draws": "200",
        "unitarity_draws": "1000",
        "normalization_draws": "1000",
        "grid_step": "0.02",
    },
}


class Config:
    """
    Extends ConfigParser to support nested sections.
    """

    def __init__(self, config_dict: Optional[dict] = None):
        self.parser = ConfigParser()
        self._sections: dict = {}
        if config_dict:
            self.read_dict(config_dict)

    def read_dict(self, config_dict: dict) -> None:
        self.parser.read_dict(config_dict)
        self._sections = self._parse_sections(self.parser)

    def _parse_sections(self, parser: ConfigParser) -> dict:
        """
        Parse a dot notation section into nested dicts.
        """
        full_sections = parser.sections()
        nested_sections: dict = {}
        for full_section in full_sections:
            parts = full_section.split(".")
            ptr = nested_sections
            for part in parts[:-1]:
                if part not in ptr:
                    ptr[part] = {}
                ptr = ptr[part]

            ptr[parts[-1]] = parser[full_section]
        return nested_sections

    def __getitem__(self, section_name: str) -> Any:
        return self._sections[section_name]


def create_config_section(config_dict: Optional[dict] = None) -> SectionProxy:
    """
    Create a default section.
    """
    return Config({"section": config_dict or {}})["section"]


def get_default_config(overrides: Optional[Dict[str, Dict[str, Any]]] = None) -> Config:
    """
    Returns the built-in configuration, with optional per-section overrides.

    Override values that are None are ignored, so unset command line flags
    fall back to the defaults.
    """
    config_dict = {section: dict(values) for section, values in DEFAULT_CONFIG.items()}
    for section, values in (overrides or {}).items():
        config_dict.setdefault(section, {}).update(
            {key: str(value) for key, value in values.items() if value is not None}
        )
    return Config(config_dict)
