"""Synthetic GOOD/BAD benchmark corpus and training-data generators.

Every case is a small Java file instantiated from a per-CWE template with
identifiers drawn from the category lexicons: BAD cases plant exactly one
exposure and record its sink line; the GOOD twin keeps the same shape with
the exposure removed or masked. Generation is a pure function of the seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..flows.rules import BENCHMARK_CWES
from ..lexicon import (
    INNOCUOUS_COMMENT_POOL,
    INNOCUOUS_NAMES,
    INNOCUOUS_STRING_POOL,
    NON_SINK_CALL_POOL,
    SENSITIVE_COMMENT_POOL,
    SENSITIVE_NAME_POOLS,
    SENSITIVE_STRING_POOL,
    SINK_CALL_POOLS,
    SensitiveCategory,
    SinkKind,
)

# Table-III-shaped per-CWE (GOOD, BAD) counts for --paper-shape runs.
PAPER_SHAPE_COUNTS: dict[int, tuple[int, int]] = {
    201: (7, 10), 204: (11, 11), 208: (10, 13), 209: (17, 17), 214: (11, 10),
    215: (10, 10), 532: (10, 13), 535: (10, 15), 536: (10, 10), 537: (10, 10),
    538: (3, 2), 550: (10, 10), 598: (10, 10), 615: (10, 10),
}


@dataclass
class BenchmarkCase:
    cwe_id: int
    polarity: str  # GOOD | BAD
    name: str
    files: dict[str, str]  # relative path -> content
    expected: list[tuple[int, str, int]]  # (cwe, relative path, sink line)
    seed: int
    planted_sources: list[str] = field(default_factory=list)

    def to_manifest_entry(self) -> dict:
        return {
            "cwe": self.cwe_id,
            "polarity": self.polarity,
            "name": self.name,
            "files": sorted(self.files),
            "expected": [
                {"cwe": cwe, "file": path, "sinkLine": line}
                for cwe, path, line in self.expected
            ],
            "seed": self.seed,
            "plantedSources": self.planted_sources,
        }


class _Writer:
    """Line-oriented emitter that reports 1-based line numbers."""

    def __init__(self) -> None:
        self.lines: list[str] = []
        self._indent = 0

    def line(self, text: str = "") -> int:
        self.lines.append(("    " * self._indent + text) if text else "")
        return len(self.lines)

    def open(self, header: str) -> int:
        n = self.line(header + " {")
        self._indent += 1
        return n

    def close(self) -> int:
        self._indent -= 1
        return self.line("}")

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


@dataclass
class _Ctx:
    rng: np.random.Generator
    cls: str
    sens: str
    plain: list[str]
    bad: bool

    def pick(self, options: list[str]) -> str:
        return options[int(self.rng.integers(len(options)))]

    def flip(self) -> bool:
        return bool(self.rng.integers(2))


def _sens_name(rng: np.random.Generator, categories: list[SensitiveCategory]) -> str:
    category = categories[int(rng.integers(len(categories)))]
    pool = SENSITIVE_NAME_POOLS[category]
    return pool[int(rng.integers(len(pool)))]


def _plain_names(rng: np.random.Generator, n: int) -> list[str]:
    picks = rng.choice(len(INNOCUOUS_NAMES), size=n, replace=False)
    return [INNOCUOUS_NAMES[int(i)] for i in picks]


def _mask_helper(w: _Writer) -> None:
    w.open("    private String mask(String value)")
    w.line('return "***";')
    w.close()


def _decoys(w: _Writer, ctx: _Ctx, count: int = 2) -> None:
    for name in ctx.plain[:count]:
        w.line(f'String {name} = "{ctx.pick(["alpha", "beta", "steady", "ready"])}";')


# ----------------------------------------------------------------------
# Per-CWE templates. Each returns (file content, sink line for BAD or None).

def _tpl_201(ctx: _Ctx) -> tuple[str, int | None]:
    w = _Writer()
    w.open(f"public class {ctx.cls}")
    w.open(f"    public void pushReport(String {ctx.sens})")
    _decoys(w, ctx)
    sink = None
    if ctx.bad:
        w.line(f'String payload = "report entry " + {ctx.sens};')
        sink = w.line("uplink.send(payload);")
    else:
        if ctx.flip():
            w.line(f"String payload = mask({ctx.sens});")
            w.line("uplink.send(payload);")
        else:
            w.line('uplink.send("report entry ready");')
    w.close()
    _mask_helper(w)
    w.close()
    return w.text(), sink


def _tpl_598(ctx: _Ctx) -> tuple[str, int | None]:
    w = _Writer()
    w.open(f"public class {ctx.cls}")
    w.open(f"    public void lookupProfile(String {ctx.sens})")
    _decoys(w, ctx)
    sink = None
    if ctx.bad:
        w.line(f'String target = "https://svc.example.com/v1/profile?key=" + {ctx.sens};')
        sink = w.line("requester.sendGet(target);")
    else:
        w.line('String target = "https://svc.example.com/v1/profile";')
        w.line(f'requester.setBody(mask({ctx.sens}));')
        w.line("requester.sendGet(target);")
    w.close()
    _mask_helper(w)
    w.close()
    return w.text(), sink


def _tpl_532(ctx: _Ctx) -> tuple[str, int | None]:
    w = _Writer()
    w.open(f"public class {ctx.cls}")
    routed = ctx.flip()
    w.open(f"    public void recordLogin(String {ctx.sens})")
    _decoys(w, ctx)
    sink = None
    if ctx.bad:
        if routed:
            w.line(f"store({ctx.sens});")
        else:
            sink = w.line(f'logger.info("login attempt with " + {ctx.sens});')
    else:
        if ctx.flip():
            w.line(f"logger.info(mask({ctx.sens}));")
        else:
            w.line('logger.info("login attempt recorded");')
    w.close()
    if ctx.bad and routed:
        w.open("    private void store(String entry)")
        sink = w.line('logger.info("stored value " + entry);')
        w.close()
    _mask_helper(w)
    w.close()
    return w.text(), sink


def _tpl_538(ctx: _Ctx) -> tuple[str, int | None]:
    w = _Writer()
    w.open(f"public class {ctx.cls}")
    w.open(f"    public void exportLedger(String {ctx.sens})")
    _decoys(w, ctx)
    sink = None
    if ctx.bad:
        w.line(f'String row = "ledger," + {ctx.sens};')
        sink = w.line("exportWriter.write(row);")
    else:
        w.line(f"String row = mask({ctx.sens});")
        w.line("exportWriter.write(row);")
    w.close()
    _mask_helper(w)
    w.close()
    return w.text(), sink


def _tpl_214(ctx: _Ctx) -> tuple[str, int | None]:
    w = _Writer()
    w.open(f"public class {ctx.cls}")
    w.open(f"    public void runMaintenance(String {ctx.sens})")
    _decoys(w, ctx)
    sink = None
    if ctx.bad:
        sink = w.line(f'runtime.exec("maintenance-tool --grant " + {ctx.sens});')
    else:
        w.line('runtime.exec("maintenance-tool --mode nightly");')
    w.close()
    w.close()
    return w.text(), sink


def _tpl_209(ctx: _Ctx) -> tuple[str, int | None]:
    w = _Writer()
    w.open(f"public class {ctx.cls}")
    w.open(f"    public void settle(String {ctx.sens})")
    _decoys(w, ctx)
    w.open("try")
    w.line("processSettlement();")
    w._indent -= 1
    w.line("} catch (Exception e) {")
    w._indent += 1
    sink = None
    if ctx.bad:
        sink = w.line(f'System.err.println("settlement failed for " + {ctx.sens});')
    else:
        w.line('System.err.println("settlement failed");')
    w.close()
    w.close()
    w.open("    private void processSettlement()")
    w.line('throw new IllegalStateException("ledger offline");')
    w.close()
    w.close()
    return w.text(), sink


def _tpl_535(ctx: _Ctx) -> tuple[str, int | None]:
    w = _Writer()
    w.open(f"public class {ctx.cls}")
    w.open(f"    public void launchJob(String {ctx.sens})")
    _decoys(w, ctx)
    w.open("try")
    w.line("scheduler.start();")
    w._indent -= 1
    w.line("} catch (Exception e) {")
    w._indent += 1
    sink = None
    if ctx.bad:
        sink = w.line(f'shell.runShell("report-failure --detail " + {ctx.sens});')
    else:
        w.line('shell.runShell("report-failure --generic");')
    w.close()
    w.close()
    w.close()
    return w.text(), sink


def _tpl_536(ctx: _Ctx) -> tuple[str, int | None]:
    w = _Writer()
    w.line("import javax.servlet.http.HttpServlet;")
    w.line("")
    w.open(f"public class {ctx.cls} extends HttpServlet")
    w.open("    protected void doGet(HttpServletRequest request, HttpServletResponse response)")
    w.line(f'String {ctx.sens} = settings.lookup("primary");')
    _decoys(w, ctx, 1)
    w.open("try")
    w.line("renderAccount(response);")
    w._indent -= 1
    w.line("} catch (Exception e) {")
    w._indent += 1
    sink = None
    if ctx.bad:
        sink = w.line(f'response.getWriter().println("lookup failed at " + {ctx.sens});')
    else:
        w.line('response.getWriter().println("temporarily unavailable");')
    w.close()
    w.close()
    w.open("    private void renderAccount(HttpServletResponse response)")
    w.line('throw new IllegalStateException("render error");')
    w.close()
    w.close()
    return w.text(), sink


def _tpl_537(ctx: _Ctx) -> tuple[str, int | None]:
    w = _Writer()
    caught = ctx.pick(["RuntimeException", "IllegalStateException", "NumberFormatException"])
    w.open(f"public class {ctx.cls}")
    w.open(f"    public String fetchEntry(String {ctx.sens})")
    _decoys(w, ctx, 1)
    w.open("try")
    w.line(f"return locate({ctx.sens});")
    w._indent -= 1
    w.line(f"}} catch ({caught} e) {{")
    w._indent += 1
    sink = None
    if ctx.bad:
        sink = w.line(f'System.out.println("lookup failed for " + {ctx.sens});')
    else:
        w.line('System.out.println("lookup failed");')
    w.line('return "";')
    w.close()
    w.close()
    w.open("    private String locate(String key)")
    w.line("return registry.find(key);")
    w.close()
    w.close()
    return w.text(), sink


def _tpl_550(ctx: _Ctx) -> tuple[str, int | None]:
    w = _Writer()
    w.line("import javax.servlet.http.HttpServlet;")
    w.line("")
    w.open(f"public class {ctx.cls} extends HttpServlet")
    w.line("    private boolean maintenanceWindow = true;")
    w.open("    protected void doPost(HttpServletRequest request, HttpServletResponse response)")
    w.line(f'String {ctx.sens} = settings.lookup("origin");')
    _decoys(w, ctx, 1)
    w.open("if (maintenanceWindow)")
    w.line("response.setStatus(503);")
    sink = None
    if ctx.bad:
        sink = w.line(f'response.getWriter().println("backend down: " + {ctx.sens});')
    else:
        w.line('response.getWriter().println("service unavailable");')
    w.close()
    w.close()
    w.close()
    return w.text(), sink


def _tpl_215(ctx: _Ctx) -> tuple[str, int | None]:
    w = _Writer()
    w.open(f"public class {ctx.cls}")
    w.line("    private static final boolean DEBUG = true;")
    w.open(f"    public void traceRequest(String {ctx.sens})")
    _decoys(w, ctx, 1)
    w.open("if (DEBUG)")
    sink = None
    if ctx.bad:
        sink = w.line(f'System.out.println("trace detail " + {ctx.sens});')
    else:
        w.line('System.out.println("trace checkpoint reached");')
    w.close()
    w.close()
    w.close()
    return w.text(), sink


def _tpl_204(ctx: _Ctx) -> tuple[str, int | None]:
    w = _Writer()
    other = ctx.plain[0]
    w.open(f"public class {ctx.cls}")
    w.open(f"    public String checkAccess(String {ctx.sens}, String attempt)")
    w.line(f'String {other} = "pending";')
    sink = None
    if ctx.bad:
        sink = w.open(f"if ({ctx.sens}.equals(attempt))")
        w.line('System.out.println("access granted");')
        w.line('return "granted";')
        w._indent -= 1
        w.line("} else {")
        w._indent += 1
        w.line('System.out.println("rejected attempt");')
        w.line('return "denied";')
        w.close()
    else:
        w.line(f"boolean accepted = {ctx.sens}.equals(attempt);")
        w.line("audit.record(accepted);")
        w.line('System.out.println("request processed");')
        w.line('return "processed";')
    w.close()
    w.close()
    return w.text(), sink


def _tpl_208(ctx: _Ctx) -> tuple[str, int | None]:
    w = _Writer()
    w.open(f"public class {ctx.cls}")
    w.open(f"    public boolean matches(String {ctx.sens}, String candidate)")
    sink = None
    if ctx.bad:
        w.open(f"for (int i = 0; i < {ctx.sens}.length(); i++)")
        sink = w.open(f"if ({ctx.sens}.charAt(i) != candidate.charAt(i))")
        w.line("return false;")
        w.close()
        w.close()
        w.line("return true;")
    else:
        w.line("boolean same = true;")
        w.open(f"for (int i = 0; i < {ctx.sens}.length(); i++)")
        w.line(f"same = same & positionMatches({ctx.sens}, candidate, i);")
        w.close()
        w.line("return same;")
    w.close()
    if not ctx.bad:
        w.open("    private boolean positionMatches(String left, String right, int index)")
        w.line("return left.charAt(index) == right.charAt(index);")
        w.close()
    w.close()
    return w.text(), sink


def _tpl_615(ctx: _Ctx) -> tuple[str, int | None]:
    w = _Writer()
    pool = SENSITIVE_COMMENT_POOL if ctx.bad else INNOCUOUS_COMMENT_POOL
    comment = ctx.pick(pool)
    w.open(f"public class {ctx.cls}")
    sink = w.line(f"    // {comment}")
    w.open(f"    public int tally(int limit)")
    w.line("int total = 0;")
    w.open("for (int i = 0; i < limit; i++)")
    w.line("total = total + i;")
    w.close()
    w.line("return total;")
    w.close()
    w.close()
    return w.text(), sink if ctx.bad else None


_TEMPLATES = {
    201: (_tpl_201, "ReportUplink", [SensitiveCategory.PII, SensitiveCategory.FINANCIAL]),
    598: (_tpl_598, "ProfileLookup",
          [SensitiveCategory.AUTH_CREDENTIALS, SensitiveCategory.QUERY_PARAMETERS]),
    532: (_tpl_532, "LoginAudit",
          [SensitiveCategory.AUTH_CREDENTIALS, SensitiveCategory.SYSTEM_CONFIG]),
    538: (_tpl_538, "LedgerExport",
          [SensitiveCategory.FINANCIAL, SensitiveCategory.SECURITY_ENCRYPTION]),
    214: (_tpl_214, "MaintenanceRunner",
          [SensitiveCategory.AUTH_CREDENTIALS, SensitiveCategory.SECURITY_ENCRYPTION]),
    209: (_tpl_209, "SettlementDesk", [SensitiveCategory.FINANCIAL, SensitiveCategory.PII]),
    535: (_tpl_535, "JobLauncher",
          [SensitiveCategory.SYSTEM_CONFIG, SensitiveCategory.AUTH_CREDENTIALS]),
    536: (_tpl_536, "AccountServlet",
          [SensitiveCategory.SYSTEM_CONFIG, SensitiveCategory.SENSITIVE_FILES_PATHS]),
    537: (_tpl_537, "RecordService", [SensitiveCategory.PII]),
    550: (_tpl_550, "HealthServlet",
          [SensitiveCategory.SYSTEM_CONFIG, SensitiveCategory.SENSITIVE_FILES_PATHS]),
    215: (_tpl_215, "RequestTracer",
          [SensitiveCategory.APP_SPECIFIC, SensitiveCategory.AUTH_CREDENTIALS]),
    204: (_tpl_204, "AccessGate", [SensitiveCategory.AUTH_CREDENTIALS]),
    208: (_tpl_208, "TokenComparer",
          [SensitiveCategory.AUTH_CREDENTIALS, SensitiveCategory.SECURITY_ENCRYPTION]),
    615: (_tpl_615, "BatchCounter", [SensitiveCategory.AUTH_CREDENTIALS]),
}


def build_case(cwe: int, polarity: str, index: int, seed: int) -> BenchmarkCase:
    template, base_cls, categories = _TEMPLATES[cwe]
    rng = np.random.default_rng([seed, cwe, 1 if polarity == "BAD" else 0, index])
    cls = f"{base_cls}{index}"
    ctx = _Ctx(rng, cls, _sens_name(rng, categories), _plain_names(rng, 3),
               polarity == "BAD")
    content, sink_line = template(ctx)
    rel = f"cwe-{cwe}/{polarity}/case_{index:03d}/{cls}.java"
    expected = []
    planted: list[str] = []
    if polarity == "BAD":
        if sink_line is None:
            raise RuntimeError(f"BAD template for CWE-{cwe} did not mark a sink line")
        expected.append((cwe, rel, sink_line))
        planted.append(ctx.sens)
    return BenchmarkCase(cwe, polarity, f"cwe{cwe}_{polarity.lower()}_{index:03d}",
                         {rel: content}, expected, seed, planted)


def generate_benchmark(per_cwe: int = 10, seed: int = 0,
                       paper_shape: bool = False) -> list[BenchmarkCase]:
    """All GOOD/BAD cases for the fourteen benchmark CWEs, deterministically."""
    if per_cwe < 1:
        raise ValueError("per_cwe must be >= 1")
    cases: list[BenchmarkCase] = []
    for cwe in BENCHMARK_CWES:
        n_good, n_bad = (PAPER_SHAPE_COUNTS[cwe] if paper_shape
                         else (per_cwe, per_cwe))
        for i in range(n_bad):
            cases.append(build_case(cwe, "BAD", i, seed))
        for i in range(n_good):
            cases.append(build_case(cwe, "GOOD", i, seed))
    return cases


def write_benchmark(cases: list[BenchmarkCase], out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for case in cases:
        for rel, content in case.files.items():
            target = out / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(content, encoding="utf-8")
    manifest = {
        "generator": "exposcan-bench",
        "cases": [case.to_manifest_entry() for case in cases],
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out


def load_benchmark(bench_dir: str | Path) -> list[BenchmarkCase]:
    bench = Path(bench_dir)
    data = json.loads((bench / "manifest.json").read_text(encoding="utf-8"))
    cases = []
    for entry in data["cases"]:
        files = {
            rel: (bench / rel).read_text(encoding="utf-8")
            for rel in entry["files"]
        }
        expected = [(e["cwe"], e["file"], e["sinkLine"]) for e in entry["expected"]]
        cases.append(BenchmarkCase(entry["cwe"], entry["polarity"], entry["name"],
                                   files, expected, entry.get("seed", 0),
                                   entry.get("plantedSources", [])))
    return cases


# ----------------------------------------------------------------------
# Synthetic labeled element records and flow serializations for training.

@dataclass
class LabeledElementRecord:
    ref: str
    kind: str      # Variable | StringLiteral | Comment | ApiCall
    name: str
    context: str
    type: str
    label: str     # Sens | NonSens | Sink | NonSink

    def row(self) -> list[str]:
        return [self.ref, self.kind, self.name, self.context, self.type, self.label]


_CONTEXT_SHAPES = [
    "public void handle() {{ String {name} = source.read(); store({name}); }}",
    "public void configure() {{ String {name} = props.get(\"entry\"); apply({name}); }}",
    "public String render() {{ String {name} = builder.next(); return {name}; }}",
    "public void refresh() {{ {name} = cache.fetch(); notifyAll({name}); }}",
]

_NUMERIC_CONTEXT_SHAPES = [
    "public void resize() {{ int {name} = metrics.read(); adjust({name}); }}",
    "public int measure() {{ int {name} = frame.width(); return {name}; }}",
]


def _all_sensitive_names() -> list[str]:
    names = []
    for pool in SENSITIVE_NAME_POOLS.values():
        names.extend(pool)
    return names


def generate_element_dataset(kind: str, n_positive: int, n_negative: int,
                             seed: int) -> list[LabeledElementRecord]:
    """Labeled records for one surface task.

    kind: variables | strings | comments | sinks (binary gate)
          | sink-kinds (8-way) | categories (8-way)
    """
    kind_tag = int.from_bytes(kind.encode("utf-8")[:4].ljust(4, b"_"), "big")
    rng = np.random.default_rng([seed, kind_tag])
    records: list[LabeledElementRecord] = []

    def ctx_for(name: str, numeric: bool = False) -> str:
        shapes = _NUMERIC_CONTEXT_SHAPES if numeric else _CONTEXT_SHAPES
        return shapes[int(rng.integers(len(shapes)))].format(name=name)

    if kind == "variables":
        # Cycle the pools so every name is covered before any repeats.
        sens = _all_sensitive_names()
        for i in range(n_positive):
            name = sens[i % len(sens)]
            records.append(LabeledElementRecord(
                f"syn:var:p{i}", "Variable", name, ctx_for(name), "String", "Sens"))
        for i in range(n_negative):
            name = INNOCUOUS_NAMES[i % len(INNOCUOUS_NAMES)]
            numeric = bool(rng.integers(2))
            records.append(LabeledElementRecord(
                f"syn:var:n{i}", "Variable", name, ctx_for(name, numeric),
                "int" if numeric else "String", "NonSens"))
    elif kind == "strings":
        for i in range(n_positive):
            value = SENSITIVE_STRING_POOL[int(rng.integers(len(SENSITIVE_STRING_POOL)))]
            holder = INNOCUOUS_NAMES[int(rng.integers(len(INNOCUOUS_NAMES)))]
            records.append(LabeledElementRecord(
                f"syn:str:p{i}", "StringLiteral", value, ctx_for(holder), "", "Sens"))
        for i in range(n_negative):
            value = INNOCUOUS_STRING_POOL[int(rng.integers(len(INNOCUOUS_STRING_POOL)))]
            holder = INNOCUOUS_NAMES[int(rng.integers(len(INNOCUOUS_NAMES)))]
            records.append(LabeledElementRecord(
                f"syn:str:n{i}", "StringLiteral", value, ctx_for(holder), "", "NonSens"))
    elif kind == "comments":
        for i in range(n_positive):
            text = SENSITIVE_COMMENT_POOL[int(rng.integers(len(SENSITIVE_COMMENT_POOL)))]
            records.append(LabeledElementRecord(
                f"syn:com:p{i}", "Comment", text, "", "", "Sens"))
        for i in range(n_negative):
            text = INNOCUOUS_COMMENT_POOL[int(rng.integers(len(INNOCUOUS_COMMENT_POOL)))]
            records.append(LabeledElementRecord(
                f"syn:com:n{i}", "Comment", text, "", "", "NonSens"))
    elif kind == "sinks":
        kinds = list(SINK_CALL_POOLS)
        for i in range(n_positive):
            pool = SINK_CALL_POOLS[kinds[int(rng.integers(len(kinds)))]]
            qualified, name = pool[int(rng.integers(len(pool)))]
            records.append(LabeledElementRecord(
                f"syn:sink:p{i}", "ApiCall", name,
                f"public void run() {{ {qualified}(message); }}\n{qualified}",
                qualified, "Sink"))
        for i in range(n_negative):
            qualified, name = NON_SINK_CALL_POOL[int(rng.integers(len(NON_SINK_CALL_POOL)))]
            records.append(LabeledElementRecord(
                f"syn:sink:n{i}", "ApiCall", name,
                f"public void run() {{ value = {qualified}(input); }}\n{qualified}",
                qualified, "NonSink"))
    elif kind == "sink-kinds":
        per = max(1, n_positive // len(SinkKind))
        i = 0
        for sink_kind in SinkKind:
            pool = SINK_CALL_POOLS[sink_kind]
            for _ in range(per):
                qualified, name = pool[int(rng.integers(len(pool)))]
                records.append(LabeledElementRecord(
                    f"syn:kind:{i}", "ApiCall", name,
                    f"public void run() {{ {qualified}(message); }}\n{qualified}",
                    qualified, sink_kind.value))
                i += 1
    elif kind == "categories":
        per = max(1, n_positive // len(SensitiveCategory))
        i = 0
        for category in SensitiveCategory:
            pool = SENSITIVE_NAME_POOLS[category]
            for _ in range(per):
                name = pool[int(rng.integers(len(pool)))]
                records.append(LabeledElementRecord(
                    f"syn:cat:{i}", "Variable", name, ctx_for(name), "String",
                    category.value))
                i += 1
    else:
        raise ValueError(f"unknown dataset kind {kind!r}")
    return records


# Flow serializations for verifier training; labels follow the Yes/No scheme.

_FLOW_SINKS = [
    ("logger.info({v});", 532), ("System.out.println({v});", 537),
    ("System.err.println({v});", 209), ("exportWriter.write({v});", 538),
    ("uplink.send({v});", 201), ("runtime.exec({v});", 214),
    ("requester.sendGet({v});", 598),
]


def generate_flow_dataset(n_true: int, n_false: int,
                          seed: int) -> tuple[list[str], list[int]]:
    from ..verification import EnrichedStep, serialize_steps

    rng = np.random.default_rng([seed, 4242])
    sens_names = _all_sensitive_names()
    serializations: list[str] = []
    labels: list[int] = []

    def steps_for(name: str, exposing: bool, cwe: int, sink_stmt: str) -> str:
        steps = [EnrichedStep(f'String {name} = vault.fetch("{name}");', "String",
                              "Source")]
        hops = int(rng.integers(0, 3))
        var = name
        for h in range(hops):
            nxt = f"hop{h}"
            steps.append(EnrichedStep(f'String {nxt} = "ctx " + {var};', "String",
                                      "Concatenation" if rng.integers(2) else "Assignment"))
            var = nxt
        if exposing:
            steps.append(EnrichedStep(sink_stmt.format(v=var), "unknown", "Sink"))
        else:
            shape = int(rng.integers(3))
            if shape == 0:
                steps.append(EnrichedStep(sink_stmt.format(v=f"mask({var})"),
                                          "unknown", "Sink"))
            elif shape == 1:
                steps.append(EnrichedStep(f'holder.put("entry", {var});', "Map",
                                          "CollectionOp"))
                steps.append(EnrichedStep(
                    sink_stmt.format(v='holder.get("label")'), "unknown", "Sink"))
            else:
                steps.append(EnrichedStep(sink_stmt.format(v=f'"{var} redacted"'),
                                          "unknown", "Sink"))
        return serialize_steps(cwe, steps)

    for i in range(n_true):
        name = sens_names[int(rng.integers(len(sens_names)))]
        sink_stmt, cwe = _FLOW_SINKS[int(rng.integers(len(_FLOW_SINKS)))]
        serializations.append(steps_for(name, True, cwe, sink_stmt))
        labels.append(1)
    for i in range(n_false):
        sink_stmt, cwe = _FLOW_SINKS[int(rng.integers(len(_FLOW_SINKS)))]
        if rng.integers(2):
            name = INNOCUOUS_NAMES[int(rng.integers(len(INNOCUOUS_NAMES)))]
        else:
            name = sens_names[int(rng.integers(len(sens_names)))]
        exposing = False
        if name in INNOCUOUS_NAMES:
            # innocuous data reaching a sink: static analysis noise
            serializations.append(steps_for(name, True, cwe, sink_stmt))
        else:
            serializations.append(steps_for(name, exposing, cwe, sink_stmt))
        labels.append(0)
    return serializations, labels
