"""
Smoke tests for the sEMG toolchain.
Run with: python tests/smoke.py
"""

import sys
import os

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

def test_cli_imports():
    """Verify the CLI can be imported without errors."""
    from app import cli
    assert 'train' in cli.commands
    assert 'eval' in cli.commands
    print("OK: CLI imports successfully")

def test_packages_import():
    """Verify the library packages can be imported."""
    from nn import build, ModelConfig
    from services import train_loop, preprocess, augment_batch
    assert callable(build)
    assert callable(train_loop)
    assert ModelConfig is not None
    assert callable(preprocess) and callable(augment_batch)
    print("OK: Packages import successfully")

def test_file_utils_import():
    """Verify file format utilities can be imported."""
    from utils import read_windows, write_windows, save_checkpoint, load_checkpoint
    assert callable(read_windows)
    assert callable(write_windows)
    assert callable(save_checkpoint)
    assert callable(load_checkpoint)
    print("OK: File utils import successfully")

def test_constants_unchanged():
    """Verify dataset geometry constants have expected values."""
    from constants import DATASET_PRESETS, SMOOTHER_KERNELS, WINDOW_MS, OVERLAP_MS, REST_LABEL

    # These values must not change
    assert DATASET_PRESETS['db5']['sample_rate_hz'] == 200.0
    assert DATASET_PRESETS['db5']['channels'] == 16
    assert DATASET_PRESETS['db4']['sample_rate_hz'] == 2000.0
    assert DATASET_PRESETS['db4']['channels'] == 12
    assert WINDOW_MS == 260.0
    assert OVERLAP_MS == 235.0
    assert SMOOTHER_KERNELS[200] == 15
    assert REST_LABEL == 0
    print("OK: Dataset constants unchanged")

def test_full_model_size():
    """Verify the full architecture builds at its expected size."""
    from nn import build, ModelConfig
    network = build(ModelConfig(timesteps=38, channels=16, num_classes=54), seed=0)
    assert network.parameter_count() == 1435187
    print("OK: Full model has 1435187 parameters")

if __name__ == '__main__':
    print("Running smoke tests...\n")

    tests = [
        test_cli_imports,
        test_packages_import,
        test_file_utils_import,
        test_constants_unchanged,
        test_full_model_size,
    ]

    failed = 0
    for test in tests:
        try:
            test()
        except Exception as e:
            print(f"FAIL: {test.__name__} - {e}")
            failed += 1

    print(f"\n{'='*40}")
    if failed:
        print(f"FAILED: {failed}/{len(tests)} tests")
        sys.exit(1)
    else:
        print(f"PASSED: {len(tests)}/{len(tests)} tests")
        sys.exit(0)
