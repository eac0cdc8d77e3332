"""Checking strategy properties and responsibility verdicts for LTLf goals."""
from .ltlf import AtomPartition, Formula, evaluate, parse, render
from .strategies import AgentTransducer, EnvTransducer
from .checkers import (Verdict, check_be, check_dom, check_env_enforceable,
                       check_weak, check_win, exists_weak)
from .responsibility import (ResponsibilityReport, ara, ipr_ant, ipr_attr,
                             pr_ant, pr_attr, pr_attr_vs_env)

__all__ = [
    "AtomPartition", "Formula", "evaluate", "parse", "render",
    "AgentTransducer", "EnvTransducer",
    "Verdict", "check_be", "check_dom", "check_env_enforceable",
    "check_weak", "check_win", "exists_weak",
    "ResponsibilityReport", "ara", "ipr_ant", "ipr_attr", "pr_ant",
    "pr_attr", "pr_attr_vs_env",
]
__version__ = "0.1.0"
