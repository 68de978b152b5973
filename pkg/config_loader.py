import yaml
from pathlib import Path
from typing import Dict, Any, Optional


class Config:
    """Configuration manager for the decontamination toolkit."""

    def __init__(self, config_path: Optional[str] = None, preset: Optional[str] = None):
        """
        Initialize configuration.

        Args:
            config_path: Path to config YAML file. If None, uses the bundled config.yaml
            preset: Name of preset to apply ('quick' or 'full')
        """
        if config_path is None:
            config_path = Path(__file__).parent / "config.yaml"

        with open(config_path, 'r') as f:
            self._config = yaml.safe_load(f) or {}

        if preset:
            self.apply_preset(preset)

    def apply_preset(self, preset_name: str):
        """Apply a configuration preset.

        Preset keys are matched against every section; a key may land in
        more than one section only if it appears in both.
        """
        presets = self._config.get('presets', {})
        if preset_name not in presets:
            raise ValueError(f"Preset '{preset_name}' not found")

        for key, value in presets[preset_name].items():
            placed = False
            for section, values in self._config.items():
                if section == 'presets' or not isinstance(values, dict):
                    continue
                if key in values:
                    values[key] = value
                    placed = True
            if not placed:
                raise ValueError(f"Preset '{preset_name}' sets unknown key '{key}'")

    def get(self, section: str, key: str, default: Any = None) -> Any:
        """Get a configuration value."""
        return self._config.get(section, {}).get(key, default)

    def set(self, section: str, key: str, value: Any):
        """Set a configuration value (for CLI overrides)."""
        if section not in self._config:
            self._config[section] = {}
        self._config[section][key] = value

    def get_simulation_config(self) -> Dict[str, Any]:
        return self._config.get('simulation', {})

    def get_oracle_config(self) -> Dict[str, Any]:
        return self._config.get('oracle', {})

    def get_bounds_config(self) -> Dict[str, Any]:
        """Get the desk-scale instance sizes for the bounds table."""
        return self._config.get('bounds', {})

    @property
    def configured_variant(self) -> Optional[str]:
        """The rule set in the file or on the command line, if any."""
        return self.get('simulation', 'variant') or None

    @property
    def variant(self) -> str:
        return self.configured_variant or 'strict'

    @property
    def allow_stay(self) -> bool:
        return self.get('simulation', 'allow_stay', False)

    @property
    def tick_budget_factor(self) -> int:
        return self.get('simulation', 'tick_budget_factor', 8)

    @property
    def state_budget(self) -> int:
        return int(self.get('oracle', 'state_budget', 500_000_000))

    @property
    def max_explored(self) -> int:
        return int(self.get('oracle', 'max_explored', 20_000_000))

    @property
    def verify_above(self) -> int:
        return self.get('oracle', 'verify_above', 1)

    @property
    def show_progress(self) -> bool:
        return self.get('oracle', 'show_progress', True)

    @property
    def samples(self) -> int:
        return self.get('matching', 'samples', 100_000)

    @property
    def matching_seed(self) -> int:
        return self.get('matching', 'seed', 20240601)

    @property
    def brute_force_max_edges(self) -> int:
        return self.get('matching', 'brute_force_max_edges', 12)

    @property
    def matching_report_side(self) -> int:
        return self.get('matching', 'report_side', 4)

    @property
    def small_height_alpha(self) -> float:
        return float(self.get('strategies', 'small_height_alpha', 3.0))

    @property
    def seed(self) -> int:
        return self.get('generation', 'seed', 7)


def load_config(config_path: Optional[str] = None, preset: Optional[str] = None) -> Config:
    """Load configuration from file."""
    return Config(config_path, preset)
