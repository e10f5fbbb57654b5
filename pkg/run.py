#!/usr/bin/env python3
"""
Hypersurface Support Engine - Startup Script
============================================

Checks the interpreter and the installed packages, reports where the
resolution cache lives, and hands the remaining arguments to the click CLI.

Usage:
    python run.py describe --algebra qci-l3-n2-standard
    python run.py run-suite no-tpp
"""

import os
import sys

from result_cache import CACHE_DIR_ENV, resolve_cache_dir


def print_banner():
    """Print the application banner"""
    print("=" * 80)
    print("HYPERSURFACE SUPPORT ENGINE - SUPPORTS AND TENSOR PRODUCT PROPERTIES")
    print("=" * 80)


def check_python_version():
    """Check if Python version is compatible"""
    if sys.version_info < (3, 9):
        print("Error: Python 3.9 or higher is required!")
        print(f"Current version: {sys.version}")
        return False
    print(f"Python version: {sys.version.split()[0]}")
    return True


def check_dependencies():
    """Check if required dependencies are installed"""
    required_packages = ['numpy', 'pandas', 'click', 'galois', 'sympy']

    missing_packages = []
    for package in required_packages:
        try:
            __import__(package)
            print(f"  ok   {package}")
        except ImportError:
            missing_packages.append(package)
            print(f"  --   {package} - Missing")

    if missing_packages:
        print(f"\nMissing packages: {', '.join(missing_packages)}")
        print("Please install missing dependencies using:")
        print("pip install -r requirements.txt")
        return False
    return True


def report_cache():
    """Show the cache root the CLI will use unless --cache-dir is given"""
    source = f"${CACHE_DIR_ENV}" if os.environ.get(CACHE_DIR_ENV) else "default"
    print(f"Resolution cache: {resolve_cache_dir()} ({source})")


def main():
    """Main function"""
    print_banner()

    if not check_python_version():
        sys.exit(1)

    print("\nChecking dependencies...")
    if not check_dependencies():
        sys.exit(1)

    report_cache()
    print("=" * 80)

    from cli import cli
    cli(args=sys.argv[1:], prog_name="run.py")


if __name__ == "__main__":
    main()
