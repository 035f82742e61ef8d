"""
Command service: runs one named command against a loaded scenario and
packages the result as a deterministic :class:`Report`.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .chambers import (
    PipelineCertificate,
    build_effective_certificate,
    certify_product,
    chamber_stabilizer,
    decompose_polytope_cone,
    extract_nef_certificates,
    nef_descent,
    validate_system,
)
from .conf import BUILTIN_BUDGETS, get_default_budgets
from .exceptions import (
    ActionError,
    BudgetExceeded,
    ConeError,
    ContractError,
    DichotomyViolation,
    DomainError,
    ExceptionalSubconeViolation,
    ScenarioError,
)
from .linalg import format_vector, primitive
from .scenario import BUNDLED_SCENARIOS, Scenario, load_scenario
from .signals import certificate_issued
from .tiling import (
    BOUNDED_WINDOW_NOTE,
    Certificate,
    CertificateKind,
    TiledCone,
    Verdict,
    certify_polyhedral_type,
    digest,
    dirichlet_carving,
    face_orbit_representatives,
    group_literal,
    verify_fundamental_domain,
)

logger = logging.getLogger(__name__)


class ExitStatus:
    VERIFIED = 0
    INPUT_ERROR = 1
    REFUTED = 2
    BUDGET_EXHAUSTED = 3

    CHOICES = [
        (VERIFIED, 'Every certificate verified'),
        (INPUT_ERROR, 'Input error - the scenario or a precondition is invalid'),
        (REFUTED, 'Refuted - an exact witness contradicts a claim'),
        (BUDGET_EXHAUSTED, 'Budget exhausted - some check could not be completed'),
    ]

    _FOR_VERDICT = {
        Verdict.VERIFIED: VERIFIED,
        Verdict.REFUTED: REFUTED,
        Verdict.BUDGET_EXHAUSTED: BUDGET_EXHAUSTED,
    }
    # worst first
    _SEVERITY = [INPUT_ERROR, REFUTED, BUDGET_EXHAUSTED, VERIFIED]

    @classmethod
    def for_verdict(cls, verdict: str) -> int:
        return cls._FOR_VERDICT[verdict]

    @classmethod
    def worst(cls, statuses) -> int:
        statuses = list(statuses)
        for status in cls._SEVERITY:
            if status in statuses:
                return status
        return cls.VERIFIED


@dataclass
class Report:
    command: str
    scenario: str
    scenario_digest: str
    budgets: Dict[str, int] = field(default_factory=dict)
    status: int = ExitStatus.VERIFIED
    results: Dict = field(default_factory=dict)
    certificates: List[dict] = field(default_factory=list)
    summary: List[str] = field(default_factory=list)
    error: Optional[str] = None

    def to_dict(self) -> dict:
        data = {
            "command": self.command,
            "scenario": self.scenario,
            "scenario_digest": self.scenario_digest,
            "budgets": dict(self.budgets),
            "status": self.status,
            "results": self.results,
            "certificates": self.certificates,
            "summary": list(self.summary),
        }
        if self.error is not None:
            data["error"] = self.error
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def resolve_budgets(scenario_budgets: Optional[Dict[str, int]] = None,
                    overrides: Optional[Dict[str, int]] = None) -> Dict[str, int]:
    """CLI overrides win over the scenario, which wins over the configured defaults."""
    budgets = get_default_budgets()
    for source in (scenario_budgets or {}, overrides or {}):
        for key, value in source.items():
            if key in BUILTIN_BUDGETS and value is not None:
                budgets[key] = int(value)
    return budgets


# ============================================================================
# COMMAND HANDLERS
# ============================================================================
#
# Each handler takes (scenario, budgets) and returns (results, certificates),
# certificates being Certificate or PipelineCertificate objects.

def _tiling(scenario: Scenario) -> TiledCone:
    tile = scenario.tile_or_default()
    if tile is None:
        raise ContractError(f"scenario '{scenario.name}' has no tile and no chamber tiles")
    return TiledCone(scenario.group, tile, scenario.target)


def _validate(scenario, budgets):
    certificate = validate_system(scenario.system, budgets["samples"], budgets["seed"], radius=budgets["radius"])
    results = {"chambers": [ch.id for ch in scenario.system.chambers]}
    return results, [certificate]


def _tile_check(scenario, budgets):
    tiling = _tiling(scenario)
    certificate = certify_polyhedral_type(tiling, budgets["samples"], budgets["fuel"], budgets["seed"])
    return {"tile": tiling.tile.to_literal()}, [certificate]


def _fundamental_domain(scenario, budgets):
    tiling = _tiling(scenario)
    radius = max(budgets["radius"], 1)
    carving = dirichlet_carving(tiling, radius)
    certificate = verify_fundamental_domain(
        tiling, carving.domain, radius, budgets["samples"], budgets["seed"], budgets["fuel"]
    )
    results = {
        "domain": carving.domain.to_literal(),
        "dirichlet_center": format_vector(carving.xi),
        "overlapping": [g.to_report() for g in carving.overlapping],
        "cuts": [format_vector(a) for a in carving.cuts],
        "domain_equals_tile": carving.domain == tiling.tile,
    }
    return results, [certificate]


def _decompose(scenario, budgets):
    if scenario.polytope is None:
        raise ContractError(f"scenario '{scenario.name}' has no 'polytope' to decompose")
    pieces, certificate = decompose_polytope_cone(
        scenario.polytope, scenario.system, budgets["radius"], budgets["samples"], budgets["seed"]
    )
    results = {
        "polytope": scenario.polytope.to_literal(),
        "pieces": [piece.to_report() for piece in pieces],
    }
    return results, [certificate]


def _stabilizer(scenario, budgets):
    results = {"chambers": []}
    certificates = []
    for ch in scenario.system.chambers:
        window = chamber_stabilizer(scenario.system, ch, budgets["radius"])
        witnesses = {"elements": [g.to_report() for g in window.elements]}
        if window.violations:
            bad = window.violations[0]
            moved = [e for e in ch.marking.exceptional_rays if primitive(bad.apply(e)) not in ch.marking.exceptional_rays]
            witnesses["violation"] = bad.to_report()
            witnesses["moved_ray"] = format_vector(moved[0]) if moved else None
            verdict = Verdict.REFUTED
        else:
            verdict = Verdict.VERIFIED
        results["chambers"].append({
            "chamber": ch.id,
            "window_size": len(window.elements),
            "violations": [g.label() for g in window.violations],
        })
        certificates.append(Certificate(
            kind=CertificateKind.STABILIZER,
            inputs_digest=digest({"group": group_literal(scenario.group), "chamber": ch.to_report()}),
            parameters={"chamber": ch.id, "radius": budgets["radius"]},
            verdict=verdict,
            witnesses=witnesses,
            notes=(BOUNDED_WINDOW_NOTE,),
            bounded_window=True,
        ))
    return results, certificates


def _descend(scenario, budgets):
    if scenario.face is None:
        raise ContractError(f"scenario '{scenario.name}' has no 'face' to descend to")
    marking, face_nef = scenario.face
    descent = nef_descent(scenario.system, _tiling(scenario), marking, face_nef, budgets["radius"])
    results = {
        "face_tile": descent.face_tile.to_literal(),
        "target_tile": descent.target_tile.to_literal(),
        "stabilizer_window": [g.to_report() for g in descent.stabilizer],
    }
    return results, [descent.certificate]


def _pipeline_effective(scenario, budgets):
    certificate = build_effective_certificate(
        scenario.system, budgets["radius"], budgets["samples"], budgets["seed"], budgets["fuel"]
    )
    return dict(certificate.references), [certificate]


def _pipeline_nef(scenario, budgets):
    eff_tile = scenario.polytope or scenario.tile_or_default()
    if eff_tile is None:
        raise ContractError(f"scenario '{scenario.name}' has no polytope or tile for the nef pipeline")
    certificate = extract_nef_certificates(
        scenario.system, eff_tile, budgets["radius"], budgets["samples"], budgets["seed"]
    )
    return dict(certificate.references), [certificate]


def _product(scenario, budgets):
    data = scenario.product
    if data is None:
        raise ContractError(f"scenario '{scenario.name}' has no 'product' block")
    cone, span, certificate = certify_product(
        data.eff1, data.eff2, data.p1, data.p2, budgets["samples"], budgets["seed"]
    )
    return {"cone": cone.to_literal(), "span": span.to_dict()}, [certificate]


def _faces(scenario, budgets):
    classes, certificate = face_orbit_representatives(_tiling(scenario), budgets["radius"])
    results = {"classes": len(classes), "tile": scenario.tile_or_default().to_literal()}
    return results, [certificate]


COMMANDS: Dict[str, Callable] = {
    "validate": _validate,
    "tile-check": _tile_check,
    "fundamental-domain": _fundamental_domain,
    "decompose": _decompose,
    "stabilizer": _stabilizer,
    "descend": _descend,
    "pipeline-effective": _pipeline_effective,
    "pipeline-nef": _pipeline_nef,
    "product": _product,
    "faces": _faces,
}

DEMO_BATTERIES: Dict[str, Tuple[str, ...]] = {
    "pell": ("tile-check", "fundamental-domain", "decompose", "pipeline-effective", "pipeline-nef"),
    "quadrant-swap": (
        "validate", "tile-check", "fundamental-domain", "descend", "stabilizer",
        "pipeline-effective", "pipeline-nef",
    ),
    "dihedral": ("tile-check", "fundamental-domain", "faces", "descend"),
    "schoen-toy": ("validate", "product", "pipeline-effective"),
}


# ============================================================================
# SERVICE
# ============================================================================

class CommandRunner:
    """
    Service class running commands and emitting reports.
    """

    @staticmethod
    def run(command: str, scenario: Scenario, overrides: Optional[Dict[str, int]] = None) -> Report:
        handler = COMMANDS.get(command)
        if handler is None:
            raise ContractError(f"unknown command '{command}' (known: {', '.join(sorted(COMMANDS))})")

        budgets = resolve_budgets(scenario.budgets, overrides)
        report = Report(command, scenario.name, scenario.digest, budgets)
        logger.info("=" * 60)
        logger.info(f"Running {command} on '{scenario.name}' with {budgets}")
        logger.info("=" * 60)

        try:
            results, certificates = handler(scenario, budgets)
        except (DichotomyViolation, ExceptionalSubconeViolation) as e:
            return CommandRunner._failed(report, ExitStatus.REFUTED, e)
        except BudgetExceeded as e:
            return CommandRunner._failed(report, ExitStatus.BUDGET_EXHAUSTED, e)
        except (ContractError, DomainError, ConeError, ActionError) as e:
            return CommandRunner._failed(report, ExitStatus.INPUT_ERROR, e)

        report.results = results
        report.certificates = [c.to_dict() for c in certificates]
        verdict = Verdict.combine(c.verdict for c in certificates)
        report.status = ExitStatus.for_verdict(verdict)
        report.summary.append(f"{command} on {scenario.name}: {verdict} (exit {report.status})")
        for certificate in certificates:
            label = certificate.statement if isinstance(certificate, PipelineCertificate) else certificate.kind
            report.summary.append(f"  {label}: {certificate.verdict}")
            for component in getattr(certificate, "components", ()):
                report.summary.append(f"    {component.kind}: {component.verdict}")

        for data in report.certificates:
            certificate_issued.send(
                sender=CommandRunner,
                certificate=data,
                command=command,
                scenario_digest=scenario.digest,
            )

        mark = "✓" if report.status == ExitStatus.VERIFIED else "✗"
        logger.info(f"{mark} {command}: {verdict}")
        return report

    @staticmethod
    def _failed(report: Report, status: int, error: Exception) -> Report:
        logger.error(f"{report.command} failed: {error}")
        report.status = status
        report.error = f"{type(error).__name__}: {error}"
        witness = getattr(error, "witness", None)
        if witness is not None:
            report.results = {"witness": format_vector(witness)}
        report.summary.append(f"{report.command} on {report.scenario}: {report.error} (exit {status})")
        return report

    @staticmethod
    def run_demo(name: str, overrides: Optional[Dict[str, int]] = None) -> Report:
        """Run a bundled scenario's command battery; the status is the worst of the runs."""
        if name not in DEMO_BATTERIES:
            raise ContractError(f"unknown demo '{name}' (known: {', '.join(BUNDLED_SCENARIOS)})")
        scenario = load_scenario(name)
        runs = [CommandRunner.run(command, scenario, overrides) for command in DEMO_BATTERIES[name]]

        report = Report("demo", scenario.name, scenario.digest, resolve_budgets(scenario.budgets, overrides))
        report.status = ExitStatus.worst(run.status for run in runs)
        report.results = {"runs": [run.to_dict() for run in runs]}
        report.summary.append(f"demo {name}: exit {report.status}")
        for run in runs:
            report.summary.extend(f"  {line}" for line in run.summary)
        return report


def run_command(cmd: str, scenario: Scenario, overrides: Optional[Dict[str, int]] = None) -> Report:
    return CommandRunner.run(cmd, scenario, overrides)


def run_demo(name: str, overrides: Optional[Dict[str, int]] = None) -> Report:
    return CommandRunner.run_demo(name, overrides)


def error_report(command: str, target: str, error: Exception, status: int) -> Report:
    """Report for failures that happen before a scenario is available."""
    report = Report(command, target, "")
    if isinstance(error, ScenarioError):
        report.results = {"errors": list(error.errors)}
    return CommandRunner._failed(report, status, error)
