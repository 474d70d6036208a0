#!/usr/bin/env python3
"""
Quick validation script to check that the discernibility toolkit is installed
and computing correctly.
"""

import os
import sys
from pathlib import Path


def check_python():
    """Check Python version."""
    version = sys.version_info
    if version.major == 3 and version.minor >= 8:
        print(f"✅ Python {version.major}.{version.minor}.{version.micro} - Good!")
        return True
    else:
        print(f"❌ Python {version.major}.{version.minor}.{version.micro} - Need 3.8+")
        return False


def check_env_file():
    """Report DISCERN_* overrides from .env, if any."""
    env_path = Path(".env")
    if not env_path.exists():
        print("✅ No .env file; built-in defaults will be used")
        return True

    overrides = [line.split("=", 1)[0] for line in env_path.read_text(encoding="utf-8-sig").splitlines()
                 if line.startswith("DISCERN_")]
    print(f"✅ .env file found with overrides: {', '.join(overrides) or 'none'}")
    return True


def check_dependencies():
    """Check if required Python packages are installed."""
    required = ["numpy", "scipy", "pydantic", "dotenv"]
    missing = []

    for package in required:
        try:
            __import__(package)
        except ImportError:
            missing.append(package)

    if missing:
        print(f"❌ Missing packages: {', '.join(missing)}")
        print("   Install: pip install -r requirements.txt")
        return False
    else:
        print("✅ All Python dependencies installed")
        return True


def check_settings():
    """Check that environment settings parse."""
    from discernibility import DiscernibilityError, Settings

    try:
        settings = Settings.from_env()
    except DiscernibilityError as e:
        print(f"❌ Invalid settings: {e}")
        return False
    print(f"✅ Settings: hbar={settings.hbar}, L={settings.lattice_sites}, seed={settings.seed}, "
          f"log level {os.getenv('DISCERN_LOG_LEVEL', 'INFO')}")
    return True


def check_spin_theorem():
    """Run the spin-1/2 total-spin check."""
    from discernibility import TheoremConfig, verify_theorem

    report = verify_theorem("SMS3", TheoremConfig(trials=10))
    if report.passed:
        print("✅ Spin-1/2 total-spin discernment verified")
        return True
    print(f"❌ Spin check failed: {', '.join(report.failures())}")
    return False


def check_lattice_theorem():
    """Run a short lattice check of Theorem 1."""
    from discernibility import TheoremConfig, verify_theorem

    report = verify_theorem(1, TheoremConfig(lattice_sites=8, trials=20))
    if report.passed:
        print(f"✅ Theorem 1 on 20 lattice states, min witness {report.values['min_witness']:.3e}")
        return True
    print(f"❌ Lattice check failed: {', '.join(report.failures())}")
    return False


def main():
    """Run all validation checks."""
    print("🔍 Weak-Discernibility Toolkit - Setup Validation")
    print("=" * 50)

    checks = [
        ("Python Version", check_python),
        ("Environment File", check_env_file),
        ("Python Dependencies", check_dependencies),
        ("Settings", check_settings),
        ("Spin Theorem", check_spin_theorem),
        ("Lattice Theorem", check_lattice_theorem),
    ]

    results = []
    for name, check_func in checks:
        print(f"\n🔧 Checking {name}...")
        try:
            result = check_func()
            results.append(result)
        except Exception as e:
            print(f"❌ {name} check failed with error: {e}")
            results.append(False)

    print("\n" + "=" * 50)
    print("📊 VALIDATION SUMMARY")
    print("=" * 50)

    passed = sum(results)
    total = len(results)

    for i, (name, _) in enumerate(checks):
        status = "✅ PASS" if results[i] else "❌ FAIL"
        print(f"{status} {name}")

    print(f"\nScore: {passed}/{total} checks passed")

    if passed == total:
        print("\n🎉 ALL CHECKS PASSED!")
        print("Your setup is ready. Run: python main.py verify --theorem 1")
    else:
        print(f"\n⚠️  {total - passed} issues found. Please fix them before proceeding.")
        print("\nCommon fixes:")
        print("• Install dependencies: pip install -r requirements.txt")
        print("• Check .env file: cat .env")

    return passed == total


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
