"""Subcommand flows: sweep, solve-lambda, onoff, energy, validate."""

from rician_lowsnr.commands.energy import run_energy
from rician_lowsnr.commands.onoff import run_onoff
from rician_lowsnr.commands.solve import run_solve
from rician_lowsnr.commands.sweep import SweepRequest, run_sweep
from rician_lowsnr.commands.validate import cmd_validate, run_validate

__all__ = ["SweepRequest", "run_sweep", "run_solve", "run_onoff", "run_energy", "cmd_validate", "run_validate"]
