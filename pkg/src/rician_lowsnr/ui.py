"""Theme, consoles, tables and the logging switch. No dependency on config or io."""

import logging
import sys

from rich import box
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.rule import Rule
from rich.table import Table
from rich.text import Text
from rich.theme import Theme

custom_theme = Theme({
    "info": "cyan",
    "warning": "bold yellow",
    "error": "bold red",
    "success": "bold green",
    "highlight": "bold magenta",
    "muted": "grey62",
    "accent": "bold cyan",
})

console = Console(theme=custom_theme, file=sys.stdout)
err_console = Console(theme=custom_theme, file=sys.stderr)


def format_number(value, digits=6):
    """Compact display of a float; None and NaN show as a dash."""
    if value is None or value != value:
        return "–"
    return f"{value:.{digits}g}"


def setup_logging(verbose=False):
    """Route library logging through Rich on stderr. DEBUG with -v, WARNING otherwise."""
    level = logging.DEBUG if verbose else logging.WARNING
    root = logging.getLogger()
    for handler in list(root.handlers):
        if isinstance(handler, RichHandler):
            root.removeHandler(handler)
    handler = RichHandler(console=err_console, show_path=verbose, rich_tracebacks=verbose, markup=False)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(level)
    logging.captureWarnings(True)
    return handler


def print_banner(out=None, subtitle="MRC Rician · low-SNR capacity"):
    """Display a compact app banner."""
    out = out or console
    title = Text()
    title.append("R", style="bold magenta")
    title.append("I", style="bold cyan")
    title.append("C", style="bold green")
    title.append("I", style="bold yellow")
    title.append("A", style="bold red")
    title.append("N", style="bold magenta")
    title.append("  ", style="")
    title.append(subtitle, style="grey62")
    out.print(Rule(title, style="bright_cyan"))


def print_error(message, title="Error", out=None):
    out = out or err_console
    out.print(Panel(f"[error]{message}[/error]", title=f"[bold red]{title}[/bold red]", border_style="red"))


def key_value_table(title, rows):
    """Two-column table of (label, value) pairs; values are formatted when numeric."""
    table = Table(title=title, box=box.SIMPLE, show_header=False, padding=(0, 2), expand=False)
    table.add_column("Quantity", style="bold white", no_wrap=True)
    table.add_column("Value", style="cyan", justify="right")
    for label, value in rows:
        shown = format_number(value, 10) if isinstance(value, float) or value is None else str(value)
        table.add_row(label, shown)
    return table


def rows_table(title, columns, rows, digits=6):
    """Table of dict rows, showing only ``columns`` (missing cells as a dash)."""
    table = Table(title=title, box=box.SIMPLE_HEAD, header_style="bold cyan", expand=False)
    for name in columns:
        justify = "left" if name == "flags" else "right"
        table.add_column(name, justify=justify, no_wrap=name != "flags")
    for row in rows:
        cells = []
        for name in columns:
            value = row.get(name)
            if isinstance(value, float) or value is None:
                cells.append(format_number(value, digits))
            else:
                cells.append(str(value) if value != "" else "–")
        table.add_row(*cells)
    return table


def check_table(title, checks):
    """Pass/fail table for validation reports; ``checks`` are dicts with name, passed, detail."""
    table = Table(title=title, box=box.SIMPLE_HEAD, header_style="bold cyan", expand=False)
    table.add_column("", width=2, no_wrap=True)
    table.add_column("Check", style="bold white", no_wrap=True)
    table.add_column("Detail", style="grey62")
    for check in checks:
        mark = "[green]✓[/green]" if check["passed"] else "[red]✗[/red]"
        table.add_row(mark, check["name"], check.get("detail", ""))
    return table
