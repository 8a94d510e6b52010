#!/usr/bin/env python3
"""
rician-lowsnr: low-SNR capacity of MRC Rician fading channels.
Run: python app.py sweep --preset fig1
"""

import os
import sys

# Allow importing rician_lowsnr when running app.py from project root
_src = os.path.join(os.path.dirname(os.path.abspath(__file__)), "src")
if _src not in sys.path:
    sys.path.insert(0, _src)

from rician_lowsnr.cli import main

# ─── Entry Point ──────────────────────────────────────────────

if __name__ == "__main__":
    sys.exit(main())
