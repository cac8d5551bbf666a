"""Proof certificates: grammar, replay and mutation testing."""
from .parser import Certificate, CertSyntaxError, Stmt, load, parse
from .replay import CONCLUSIONS, CertError, ReplayReport, StepResult, replay

__all__ = ["Certificate", "CertSyntaxError", "Stmt", "load", "parse", "CONCLUSIONS", "CertError",
           "ReplayReport", "StepResult", "replay"]
