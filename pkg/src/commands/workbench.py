import functools
import logging
from fractions import Fraction
from typing import Callable

import colorlog
from pydantic import ValidationError

from abstract.alliance_spec import AllianceSpec, GeneralizedAllianceSpec, dump_spec, read_spec
from abstract.command_result import CommandResult
from abstract.config_container import WorkbenchConfig
from abstract.errors import InternalConflictError, WorkbenchError
from abstract.topology import TopologyMatrix, read_topology, serialize_topology, write_topology
from abstract.verdict import MaximalityVerdict
from analysis.alliance_construction import count_specs, derive_topology, enumerate_specs
from analysis.beamforming import verify_decodability
from analysis.generalized import (
    compute_e_max,
    derive_generalized_topology,
    dof_report,
    explain_topology,
    is_mtm_for_dof,
    lift,
)
from analysis.graph_analysis import alignment_sets, build_message_graph, is_maximal_by_definition, to_dot
from analysis.matrix_analysis import (
    Strategy,
    alignment_set_list,
    canonicalize,
    find_blocks,
    is_mtm,
    render_blocks,
    transform_to_mtm,
)
from analysis.oracle import classify_all, probe_converse, verify_iff_theorems, verify_sampled, write_catalog_csv

HALF = Fraction(1, 2)


def guarded(command: Callable[..., CommandResult]) -> Callable[..., CommandResult]:
    """Turn input and usage failures into an exit-code-2 result."""

    @functools.wraps(command)
    def wrapper(self: "Workbench", *args, **kwargs) -> CommandResult:
        try:
            return command(self, *args, **kwargs)
        except (WorkbenchError, ValidationError, OSError) as e:
            message = str(e).splitlines()[0] if str(e) else type(e).__name__
            self.logger.error(message)
            return CommandResult(exit_code=2, human_text=f"error: {message}", machine_payload={"error": message})

    return wrapper


def _rows(t: TopologyMatrix) -> list[str]:
    return serialize_topology(t).split("\n")


def _one_based(groups: list[tuple[int, ...]]) -> list[list[int]]:
    return [[m + 1 for m in group] for group in groups]


class Workbench:
    """Every command of the `tim` tool. Methods return a CommandResult and never exit."""

    def __init__(self, config: WorkbenchConfig | None = None):
        self.config = config or WorkbenchConfig()

        self.logger = logging.getLogger(self.__class__.__name__)
        self.logger.setLevel(self.config.log_level)
        analysis_logger = logging.getLogger("analysis")
        analysis_logger.setLevel(self.config.log_level)

        console_handler = logging.StreamHandler()
        console_handler.setLevel(logging.DEBUG)
        formatter = colorlog.ColoredFormatter(
            "%(log_color)s%(levelname)s%(reset)s - %(message)s",
            datefmt=None,
            reset=True,
            log_colors={
                "DEBUG": "cyan",
                "INFO": "green",
                "WARNING": "yellow",
                "ERROR": "red",
                "CRITICAL": "bold_red",
            },
        )

        console_handler.setFormatter(formatter)
        if not self.logger.hasHandlers():
            self.logger.addHandler(console_handler)
        if not analysis_logger.hasHandlers():
            analysis_logger.addHandler(console_handler)

    def _load_spec(self, spec_path: str) -> AllianceSpec | GeneralizedAllianceSpec:
        spec = read_spec(spec_path)
        self.logger.debug(f"Loaded {'generalized ' if isinstance(spec, GeneralizedAllianceSpec) else ''}spec")
        return spec

    @guarded
    def cmd_analyze(self, path: str, dof: Fraction = HALF, dot: str | None = None) -> CommandResult:
        """Maximality verdict for a topology file, with block decomposition and witnesses.

        Args:
            path (str): topology grid file
            dof (Fraction): target symmetric DoF 1/n; 1/2 uses the alignment-set analysis
            dot (str | None): where to write the message graph in DOT format

        Returns:
            CommandResult: exit 0 when maximal for the target DoF, 1 otherwise
        """
        t = read_topology(path)
        if dof.numerator != 1 or dof.denominator < 2:
            raise WorkbenchError(f"target DoF must be 1/n with n >= 2, got {dof}")

        if dot is not None:
            g = build_message_graph(t)
            with open(dot, "w", encoding="utf-8") as file:
                file.write(to_dot(g, alignment_sets(g)))
            self.logger.info(f"Wrote message graph to {dot}")

        if dof == HALF:
            verdict = is_maximal_by_definition(t)
            blocks = is_mtm(t)
            if blocks.is_maximal != verdict.is_maximal:
                self.logger.warning("Block discriminant disagrees with the definition")
            if verdict.witness is not None and verdict.witness.kind == "degenerate":
                grid, details = "\n".join(_rows(t)), []
            else:
                canonical, p = canonicalize(t)
                decomposition = find_blocks(canonical).model_copy(update={"permutation": p})
                grid = render_blocks(decomposition, t)
                details = [v.describe() for v in decomposition.violations]
        else:
            verdict = is_mtm_for_dof(t, dof.denominator - 1)
            grid = "\n".join(_rows(t))
            details = [v.describe() for v in verdict.witness.violations] if verdict.witness else []

        headline = self._headline(verdict, dof)
        lines = [headline, grid]
        if verdict.witness is not None and verdict.witness.kind != "block-violation":
            lines.append(verdict.witness.describe())
        lines.extend(details)

        return CommandResult(
            exit_code=0 if verdict.is_maximal else 1,
            human_text="\n".join(lines),
            machine_payload={
                "command": "analyze",
                "k": t.k,
                "dof": str(dof),
                "is_dof_optimal": verdict.is_dof_optimal,
                "is_maximal": verdict.is_maximal,
                "alignment_sets": _one_based(alignment_set_list(t)),
                "witness": verdict.witness.describe() if verdict.witness else None,
                "violations": details,
            },
        )

    @staticmethod
    def _headline(verdict: MaximalityVerdict, dof: Fraction) -> str:
        if verdict.is_maximal:
            return f"maximal, DoF {dof}"
        if verdict.is_dof_optimal:
            return f"not maximal, DoF {dof} achievable"
        return f"not maximal, DoF {dof} not achieved"

    @guarded
    def cmd_construct(self, spec_path: str, out: str | None = None) -> CommandResult:
        spec = self._load_spec(spec_path)
        if isinstance(spec, AllianceSpec):
            t = derive_topology(spec)
            e_max = 1 if t.k > 1 else 0
        else:
            t = derive_generalized_topology(spec, self.config.strict_intersection)
            e_max = compute_e_max(spec)

        if out is not None:
            write_topology(t, out)
            self.logger.info(f"Wrote {t.k}-user topology to {out}")

        degenerate = t.k == 1
        text = serialize_topology(t) + ("\ndegenerate single-user channel" if degenerate else "")
        return CommandResult(
            exit_code=0,
            human_text=text,
            machine_payload={
                "command": "construct",
                "k": t.k,
                "topology": _rows(t),
                "e_max": e_max,
                "dof": str(Fraction(1, e_max + 1)),
                "degenerate": degenerate,
            },
        )

    @guarded
    def cmd_transform(self, path: str, strategy: Strategy = "auto", out: str | None = None) -> CommandResult:
        t = read_topology(path)
        try:
            result = transform_to_mtm(t, strategy, self.config.search_limit)
        except InternalConflictError as e:
            r, j = e.pair
            self.logger.info(f"Internal conflict between W{r + 1} and W{j + 1}")
            return CommandResult(
                exit_code=1,
                human_text=str(e),
                machine_payload={"command": "transform", "conflict": [r + 1, j + 1]},
            )

        if out is not None:
            write_topology(result, out)
        added = result.added_links(t)
        lines = [serialize_topology(result), f"added links: {len(added)}"]
        lines.extend(f"  receiver {r + 1} <- transmitter {j + 1}" for r, j in added)
        return CommandResult(
            exit_code=0,
            human_text="\n".join(lines),
            machine_payload={
                "command": "transform",
                "strategy": strategy,
                "topology": _rows(result),
                "added_links": [[r + 1, j + 1] for r, j in added],
            },
        )

    @guarded
    def cmd_enumerate(self, k: int, canonical: bool = False, csv: str | None = None) -> CommandResult:
        catalog = classify_all(k, self.config.max_exhaustive_k)
        maximal = catalog.codes(catalog.maximal)
        classes = catalog.codes(catalog.maximal, representatives=True)
        optimal = len(catalog.codes(catalog.dof_optimal))

        lines = [
            f"{len(catalog)} matrices, {optimal} DoF-1/2 optimal, {len(maximal)} maximal in {len(classes)} classes"
        ]
        if canonical:
            for code in classes:
                entry = catalog[code]
                lines.append(f"  {entry.matrix.one_line()}  alliances={entry.alliance_count}  orbit={entry.orbit_size}")
        if csv is not None:
            rows = write_catalog_csv(catalog, csv, canonical_only=canonical)
            self.logger.info(f"Wrote {rows} rows to {csv}")

        return CommandResult(
            exit_code=0,
            human_text="\n".join(lines),
            machine_payload={
                "command": "enumerate",
                "k": k,
                "total": len(catalog),
                "dof_optimal": optimal,
                "maximal": len(maximal),
                "maximal_classes": [TopologyMatrix.from_code(k, c).one_line() for c in classes],
            },
        )

    @guarded
    def cmd_verify_theorems(self, k: int, samples: int | None = None, converse: int | None = None) -> CommandResult:
        """Run the exhaustive (or sampled) cross-checks and optionally a converse probe.

        Args:
            k (int): number of users
            samples (int | None): draw this many random matrices instead of enumerating
            converse (int | None): also compare the acyclic bound on uniform specs of this interferer count

        Returns:
            CommandResult: exit 0 when every check passes
        """
        if samples is not None:
            report = verify_sampled(k, samples, self.config.seed)
        else:
            report = verify_iff_theorems(k, self.config)
        if converse is not None:
            probe = probe_converse(k, converse, self.config.max_acyclic_k)
            report = report.model_copy(update={"checks": report.checks + (probe,)})

        lines = [report.describe()]
        for check in report.checks:
            scope = f", {check.detail}" if check.detail else ""
            lines.append(f"  {'ok  ' if check.passed else 'FAIL'} {check.name} ({check.checked} checked{scope})")
            lines.extend(f"       {m}" for m in check.mismatches[:10])
        self.logger.info(f"k = {k}: {report.describe()}")

        return CommandResult(
            exit_code=0 if report.passed else 1,
            human_text="\n".join(lines),
            machine_payload={"command": "verify-theorems", **report.model_dump(mode="json")},
        )

    @guarded
    def cmd_verify_dof(
        self,
        path: str,
        spec_path: str | None = None,
        trials: int | None = None,
        tol: float | None = None,
        extension: int | None = None,
    ) -> CommandResult:
        t = read_topology(path)
        spec = self._load_spec(spec_path) if spec_path else None
        report = verify_decodability(t, spec, trials=trials, tol=tol, extension=extension, config=self.config)

        if report.dof is not None:
            lines = [f"DoF {report.dof} over {report.trials} trials, worst margin {report.worst_margin:.3g}"]
        else:
            lines = [f"no DoF 1/{report.extension} with {report.extension} slots"]
            lines.extend(
                f"  receiver {r.receiver + 1} cannot separate W{r.receiver + 1} (margin {r.margin:.3g})"
                for r in report.receivers
                if not r.separable
            )

        payload = report.model_dump(mode="json")
        for receiver in payload["receivers"]:
            receiver["receiver"] += 1
        return CommandResult(
            exit_code=0 if report.dof is not None else 1,
            human_text="\n".join(lines),
            machine_payload={"command": "verify-dof", **payload},
        )

    @guarded
    def cmd_bound(self, path: str, spec_path: str | None = None) -> CommandResult:
        t = read_topology(path)
        if spec_path:
            spec = self._load_spec(spec_path)
            generalized = lift(spec) if isinstance(spec, AllianceSpec) else spec
        else:
            generalized = explain_topology(t)
            if generalized is None:
                self.logger.warning("No alliance structure explains this topology")
                return CommandResult(
                    exit_code=1,
                    human_text="unclassified: no alliance structure explains this topology",
                    machine_payload={"command": "bound", "unclassified": True},
                )

        report = dof_report(t, generalized, self.config.max_acyclic_k)
        return CommandResult(
            exit_code=0 if report.tight else 1,
            human_text=report.describe(),
            machine_payload={"command": "bound", **report.model_dump(mode="json")},
        )

    @guarded
    def cmd_export_dot(self, path: str, out: str | None = None) -> CommandResult:
        t = read_topology(path)
        g = build_message_graph(t)
        text = to_dot(g, alignment_sets(g))
        if out is not None:
            with open(out, "w", encoding="utf-8") as file:
                file.write(text)
            self.logger.info(f"Wrote message graph to {out}")
            text = f"wrote {out}"
        return CommandResult(
            exit_code=0,
            human_text=text.rstrip("\n"),
            machine_payload={
                "command": "export-dot",
                "k": t.k,
                "edges": len(g.alignment_edges) + len(g.conflict_edges),
            },
        )

    @guarded
    def cmd_specs(self, k: int, n: int, count_only: bool = False) -> CommandResult:
        if count_only:
            count = count_specs(k, n)
            return CommandResult(
                exit_code=0,
                human_text=str(count),
                machine_payload={"command": "specs", "k": k, "n": n, "count": count},
            )

        lines = [dump_spec(spec, indent=None) for spec in enumerate_specs(k, n)]
        return CommandResult(
            exit_code=0,
            human_text="\n".join(lines),
            machine_payload={"command": "specs", "k": k, "n": n, "count": len(lines)},
        )
