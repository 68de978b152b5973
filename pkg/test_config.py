import os
import tempfile
import unittest

from config_loader import Config, load_config


class TestConfig(unittest.TestCase):
    """Test configuration loading, presets and overrides."""

    def test_bundled_defaults(self):
        """Test the values shipped in config.yaml."""
        config = load_config()
        self.assertEqual(config.variant, 'strict')
        self.assertIsNone(config.configured_variant)
        self.assertFalse(config.allow_stay)
        self.assertEqual(config.tick_budget_factor, 8)
        self.assertEqual(config.verify_above, 1)
        self.assertEqual(config.samples, 100_000)
        self.assertEqual(config.matching_seed, 20240601)
        self.assertEqual(config.brute_force_max_edges, 12)
        self.assertEqual(config.matching_report_side, 4)
        self.assertEqual(config.small_height_alpha, 3.0)
        self.assertEqual(config.seed, 7)
        bounds = config.get_bounds_config()
        self.assertEqual(bounds['tree_n'], 400)
        self.assertEqual(bounds['oracle_max_vertices'], 10)
        self.assertEqual(bounds['spider_arms'], [5, 5, 4])

    def test_quick_preset(self):
        """Test that the quick preset shrinks the instances."""
        config = Config(preset='quick')
        self.assertEqual(config.samples, 2000)
        self.assertEqual(config.matching_report_side, 2)
        self.assertEqual(config.get('bounds', 'tree_n'), 100)
        self.assertEqual(config.get('bounds', 'oracle_max_vertices'), 8)
        self.assertEqual(config.get('bounds', 'spider_arms'), [3, 3, 2])

    def test_full_preset(self):
        """Test that the full preset grows the instances."""
        config = Config(preset='full')
        self.assertEqual(config.get('bounds', 'tree_n'), 1000)
        self.assertEqual(config.get('bounds', 'mesh_q'), 4)

    def test_unknown_preset(self):
        """Test that an unknown preset name raises ValueError."""
        with self.assertRaises(ValueError):
            Config(preset='huge')

    def test_preset_with_unknown_key(self):
        """Test that a preset naming a key no section has raises ValueError."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "config.yaml")
            with open(path, 'w') as f:
                f.write("simulation:\n  variant: strict\npresets:\n  odd:\n    nonsense: 1\n")
            config = Config(path)
            with self.assertRaises(ValueError):
                config.apply_preset('odd')

    def test_get_and_set(self):
        """Test CLI-style overrides."""
        config = Config()
        self.assertIsNone(config.get('bounds', 'missing'))
        self.assertEqual(config.get('bounds', 'missing', 3), 3)
        config.set('simulation', 'variant', 'lenient')
        config.set('extra', 'key', 'value')
        self.assertEqual(config.variant, 'lenient')
        self.assertEqual(config.get('extra', 'key'), 'value')

    def test_sparse_file_falls_back_to_defaults(self):
        """Test properties when the file leaves sections out."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "config.yaml")
            with open(path, 'w') as f:
                f.write("generation:\n  seed: 99\n")
            config = Config(path)
        self.assertEqual(config.seed, 99)
        self.assertEqual(config.variant, 'strict')
        self.assertEqual(config.tick_budget_factor, 8)
        self.assertEqual(config.state_budget, 500_000_000)
        self.assertEqual(config.max_explored, 20_000_000)
        self.assertEqual(config.get_bounds_config(), {})

    def test_empty_file(self):
        """Test that an empty file loads as an empty configuration."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "config.yaml")
            open(path, 'w').close()
            config = Config(path)
        self.assertEqual(config.get_simulation_config(), {})
        self.assertTrue(config.show_progress)


if __name__ == '__main__':
    unittest.main()
