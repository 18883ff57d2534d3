from app.cli.commands import compare, compute, oracle, sweep, tables

COMMANDS = [compute, sweep, compare, tables, oracle]
