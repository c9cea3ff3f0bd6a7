# __init__.py for the commands subpackage
# This subpackage contains the CLI subcommand definitions for the experiment_service.

from . import fit, phase, plan, resources, simulate, sweep

COMMANDS = [simulate, sweep, fit, plan, phase, resources]
