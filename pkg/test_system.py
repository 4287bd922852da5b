#!/usr/bin/env python3
"""
Dynamics Toolkit - System Test Script

End-to-end smoke run of the command-line pipelines on the bundled source
configurations. Each check runs one command into a scratch directory and
verifies its exit code and artifacts.

Main Functions:
- check_polynomial_negative: covering search on z^2 ends in BudgetExhausted
- check_exponential_certificate: covering search on e^z finds a certificate
- check_squaring_entropy: entropy curve of z^2 on the unit circle
- check_lacunary_example: lacunary product checks
- run_checks: Runs every check and collects the results
- main: Orchestrates all checks and prints a summary

Dependencies:
- logging: For consistent logging output

Usage:
Run this script from the repository root:
    python test_system.py

Author: Dynamics Toolkit Team
Last updated: 2026-10-18
"""

import os
import sys
import json
import logging
import tempfile
from typing import Any, Dict, List, Tuple

from start_cli import main as cli_main

# Configure logging for test output
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s',
    handlers=[
        logging.StreamHandler()
    ]
)

SOURCES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "sources")


def _run(command: str, source: str, out_dir: str) -> int:
    return cli_main([command, "--config", os.path.join(SOURCES_DIR, source), "--out-dir", out_dir])


def _load(out_dir: str, name: str) -> Dict[str, Any]:
    with open(os.path.join(out_dir, name), "r", encoding="utf-8") as f:
        return json.load(f)


def check_polynomial_negative(scratch: str) -> bool:
    """
    z^2 never grows like R^j, so the search must exhaust its schedule.

    Returns:
        bool: True if the run exits with 3 and records BudgetExhausted
    """
    logging.info("Checking polynomial covering search...")
    out_dir = os.path.join(scratch, "polynomial")
    try:
        code = _run("covering-search", "polynomial.json", out_dir)
        status = _load(out_dir, "certificate.json")["status"]
        if code == 3 and status == "BudgetExhausted":
            logging.info("✅ Polynomial search is an honest negative")
            return True
        logging.error(f"❌ Unexpected outcome: exit {code}, status {status}")
        return False
    except Exception as e:
        logging.error(f"❌ Polynomial check error: {e}")
        return False


def check_exponential_certificate(scratch: str) -> bool:
    """
    e^z with N = 3 has a self-covering domain at the first radii.

    Returns:
        bool: True if a certificate and its figures are written
    """
    logging.info("Checking exponential covering search...")
    out_dir = os.path.join(scratch, "exp")
    try:
        code = _run("covering-search", "exp_n3.json", out_dir)
        if code != 0:
            logging.error(f"❌ Exponential search exited with {code}")
            return False
        certificate = _load(out_dir, "certificate.json")
        figures = all(os.path.exists(os.path.join(out_dir, name)) for name in ("domain.svg", "heatmap.svg"))
        logging.info(f"✅ Certificate case {certificate['case_tag']} at R={certificate['R']:g}")
        return certificate["status"] == "Certificate" and figures
    except Exception as e:
        logging.error(f"❌ Exponential check error: {e}")
        return False


def check_squaring_entropy(scratch: str) -> bool:
    """
    The separated-set curve of z^2 on the unit circle should approach log 2.

    Returns:
        bool: True if h_lower lies between 0.5 and 0.8
    """
    logging.info("Checking squaring map entropy...")
    out_dir = os.path.join(scratch, "circle")
    try:
        if _run("entropy", "squaring_circle.json", out_dir) != 0:
            return False
        h_lower = _load(out_dir, "entropy.json")["curve"]["estimate"]["h_lower"]
        logging.info(f"📊 h_lower = {h_lower:.4f} (log 2 = 0.6931)")
        return 0.5 < h_lower < 0.8
    except Exception as e:
        logging.error(f"❌ Entropy check error: {e}")
        return False


def check_lacunary_example(scratch: str) -> bool:
    """
    Annuli between consecutive zeros are covered at most once.

    Returns:
        bool: True if the example run reports the annulus verdict
    """
    logging.info("Checking lacunary product example...")
    out_dir = os.path.join(scratch, "lacunary")
    try:
        code = _run("example-product", "lacunary_example.json", out_dir)
        payload = _load(out_dir, "example.json")
        if code != 0:
            logging.warning(f"⚠️  Example ended with {payload['status']}")
            return False
        logging.info(f"📊 Verdicts: {payload['verdicts']}")
        return bool(payload["verdicts"]["annulus_at_most_once"])
    except Exception as e:
        logging.error(f"❌ Example check error: {e}")
        return False


def run_checks(scratch: str) -> Tuple[int, int, List[Tuple[str, bool]]]:
    """
    Run all system checks and return results.

    Returns:
        Tuple[int, int, List[Tuple[str, bool]]]: (passed_count, total_count, check_results)
    """
    checks = [
        ("Polynomial search", check_polynomial_negative),
        ("Exponential certificate", check_exponential_certificate),
        ("Squaring entropy", check_squaring_entropy),
        ("Lacunary example", check_lacunary_example),
    ]

    passed = 0
    results = []
    for name, check in checks:
        logging.info(f"\n{name}:")
        result = check(scratch)
        results.append((name, result))
        if result:
            passed += 1
    return passed, len(checks), results


def main() -> bool:
    logging.info("🚀 Dynamics Toolkit - System Test")
    logging.info("=" * 50)

    with tempfile.TemporaryDirectory(prefix="dyn-system-") as scratch:
        passed, total, results = run_checks(scratch)

    logging.info("\n" + "=" * 50)
    for name, result in results:
        logging.info(f"{'✅' if result else '❌'} {name}")
    logging.info(f"📈 Test Results: {passed}/{total} passed")
    if passed == total:
        logging.info("🎉 All checks passed.")
    else:
        logging.warning("⚠️  Some checks failed. See the log above.")
    return passed == total


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
