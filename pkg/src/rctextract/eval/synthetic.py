"""Annotated synthetic abstracts shaped like two-arm glaucoma trial reports.

Each abstract has a title, an objective paragraph, a methods paragraph
holding the patient group and both arms, and a results paragraph holding the
outcome and the two per-arm results. Noise adds distractor sentences with
numbers (baseline values, adverse events, p-values, dosing), varies the
wording, and shuffles sentence order inside the results.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from ..corpus import Abstract, parse_annotated

DRUGS = (
    "latanoprost", "timolol", "tafluprost", "travoprost", "bimatoprost", "brimonidine",
    "dorzolamide", "brinzolamide", "betaxolol", "carteolol", "unoprostone", "pilocarpine",
)
CONTROLS = ("placebo", "vehicle", "timolol", "latanoprost")
PROCEDURES = (
    "trabeculectomy", "phacotrabeculectomy", "trabeculoplasty", "iridotomy", "viscocanalostomy",
)
DISEASES = (
    "normal tension glaucoma", "primary open-angle glaucoma", "ocular hypertension",
    "angle-closure glaucoma", "pseudoexfoliation glaucoma", "pigmentary glaucoma",
    "chronic glaucoma",
)
PATIENT_HEADS = ("patients", "subjects", "participants", "adults", "eyes")
OUTCOME_HEADS = ("changes", "reduction", "decrease", "change", "reductions")


@dataclass(frozen=True)
class Outcome:
    name: str
    abbrev: Optional[str]
    kind: str  # "meas", "perc" or "num"
    unit: str
    center: float
    spread: float


OUTCOMES = (
    Outcome("intraocular pressure", "IOP", "meas", "mmHg", -4.0, 2.0),
    Outcome("diurnal intraocular pressure", None, "meas", "mmHg", -3.5, 2.0),
    Outcome("mean deviation", "MD", "meas", "dB", -0.8, 0.8),
    Outcome("retinal nerve fiber layer thickness", None, "meas", "microm", -2.0, 1.5),
    Outcome("visual field progression", None, "perc", "%", 20.0, 10.0),
    Outcome("success rate", None, "perc", "%", 70.0, 15.0),
    Outcome("central corneal thickness", "CCT", "meas", "microm", -5.0, 3.0),
)


@dataclass(frozen=True)
class NoiseConfig:
    """Rates (0..1) of the perturbations applied to each abstract.

    Attributes
    ----------
    baseline : probability of a results-section baseline sentence with two
        numbers of the same type as the results
    adverse : probability of an adverse-event sentence (fractions, percents)
    pvalue : probability of an extra p-value sentence
    methods_numbers : probability of a methods sentence quoting outcome-type
        numbers outside the results
    secondary : probability of a secondary outcome sentence with its own pair
        of numbers (different type when possible)
    lexical : probability of each optional wording variation
    shuffle : probability of shuffling the results sentences
    unstructured : probability of dropping all headings
    """

    baseline: float = 0.0
    adverse: float = 0.0
    pvalue: float = 0.0
    methods_numbers: float = 0.0
    secondary: float = 0.0
    lexical: float = 0.0
    shuffle: float = 0.0
    unstructured: float = 0.0


NOISE_PRESETS: Dict[str, NoiseConfig] = {
    "none": NoiseConfig(),
    "low": NoiseConfig(baseline=0.3, adverse=0.3, pvalue=0.3, methods_numbers=0.2,
                       secondary=0.2, lexical=0.3, shuffle=0.3),
    "medium": NoiseConfig(baseline=0.6, adverse=0.5, pvalue=0.5, methods_numbers=0.5,
                          secondary=0.5, lexical=0.5, shuffle=0.5),
    "high": NoiseConfig(baseline=0.9, adverse=0.8, pvalue=0.8, methods_numbers=1.0,
                        secondary=0.8, lexical=0.8, shuffle=0.8),
}


def noise_config(noise: Union[str, NoiseConfig, dict, None]) -> NoiseConfig:
    if noise is None:
        return NoiseConfig()
    if isinstance(noise, NoiseConfig):
        return noise
    if isinstance(noise, str):
        try:
            return NOISE_PRESETS[noise]
        except KeyError:
            raise ValueError(f"unknown noise preset {noise!r}; choose from {sorted(NOISE_PRESETS)}")
    return NoiseConfig(**noise)


class _Writer:
    def __init__(self, rng: np.random.Generator, noise: NoiseConfig):
        self.rng = rng
        self.noise = noise

    def pick(self, seq: Sequence):
        return seq[int(self.rng.integers(len(seq)))]

    def chance(self, p: float) -> bool:
        return bool(self.rng.random() < p)

    def value(self, o: Outcome, sd: bool = True, shift: float = 0.0) -> str:
        v = o.center + shift + o.spread * self.rng.standard_normal()
        if o.kind == "perc":
            v = min(99.0, max(1.0, abs(v)))
            return f"{v:.1f}%"
        text = f"{v:.1f}"
        if sd:
            text += f" +/-{abs(o.spread * (0.5 + self.rng.random())):.1f}"
        return f"{text} {o.unit}"

    def baseline(self, o: Outcome) -> str:
        """A pre-treatment value of the outcome, same type as the results."""
        return self.value(o, shift=5 * o.spread - o.center)

    def pvalue(self) -> str:
        return self.pick(("p<0.001", "p<0.01", "p=0.02", "P<0.05", "p=0.003"))


def _cap(s: str) -> str:
    return s[:1].upper() + s[1:]


def _head(phrase: str, tag: str, cap: bool = False) -> str:
    """Wrap the last word of ``phrase`` (its head) in ``tag``."""
    if cap:
        phrase = _cap(phrase)
    *mods, last = phrase.split(" ")
    return " ".join(mods + [f"<{tag}>{last}</{tag}>"])


def _abstract_text(w: _Writer) -> str:
    noise = w.noise
    surgical = w.chance(0.15)
    if surgical:
        arm1, arm2 = w.pick(PROCEDURES), "medical therapy"
    else:
        arm1 = w.pick(DRUGS)
        arm2 = w.pick([c for c in CONTROLS if c != arm1])
    disease = w.pick(DISEASES)
    o = w.pick(OUTCOMES)
    p_head = w.pick(PATIENT_HEADS) if w.chance(noise.lexical) else "patients"
    oc_head = w.pick(OUTCOME_HEADS) if w.chance(noise.lexical) else "changes"
    weeks = int(w.rng.integers(2, 13))
    n_pat = int(w.rng.integers(30, 400))
    name = o.name
    if o.abbrev and w.chance(0.7):
        name_intro = f"{o.name} ({o.abbrev})"
        name = o.abbrev
    else:
        name_intro = o.name

    title = (f"TITLE: {_cap(name_intro.split(' (')[0])} lowering effect of {arm1} compared to "
             f"{arm2} in patients with {disease}: a randomized, double-masked study.")
    objective = (f"PURPOSE: To compare the efficacy and safety of {arm1} with {arm2} "
                 f"in {disease}.")

    methods = []
    if w.chance(noise.lexical):
        methods.append(f"A total of {n_pat} {p_head} were enrolled in a randomized, "
                       f"double-masked, parallel-group and multicenter study.")
    lead = f"{n_pat} " if w.chance(0.3) else ""
    methods.append(
        f"{_cap(lead)}<P>{_cap(p_head) if not lead else p_head}</P> with {disease} were "
        f"randomly assigned to either {_head(arm1, 'A1', True)} or {_head(arm2, 'A2', True)}."
    )
    if surgical:
        methods.append(f"Follow-up visits were scheduled every {weeks} weeks.")
    else:
        freq = w.pick(("once a day in the morning", "twice daily", "once daily at night"))
        methods.append(f"Both solutions were instilled {freq} for {weeks} weeks.")
    if w.chance(noise.methods_numbers):
        methods.append(f"Mean {name} at baseline were {w.baseline(o)} in the {arm1} "
                       f"group and {w.baseline(o)} in the {arm2} group.")

    main = (f"Mean {name} <OC>{oc_head}</OC> from baseline were <R1>{w.value(o)}</R1> in the "
            f"{arm1} group and <R2>{w.value(o, shift=o.spread)}</R2> in the {arm2} group "
            f"at {weeks} weeks")
    if w.chance(noise.lexical):
        main = (f"The mean <OC>{oc_head}</OC> in {name} were <R1>{w.value(o)}</R1> in the "
                f"{arm1} group and <R2>{w.value(o, shift=o.spread)}</R2> in the {arm2} group")
    if w.chance(0.6):
        main += f", with a statistically significant difference ({w.pvalue()})"
    # distractors reuse the local wording of the result sentence; in reading
    # order baseline values come first, secondary findings after the result
    before, after = [], []
    if w.chance(noise.baseline):
        base = (f"Mean {name} at baseline were {w.baseline(o)} in the {arm1} group and "
                f"{w.baseline(o)} in the {arm2} group")
        if w.chance(0.6):
            base += f", with no statistically significant difference (p={0.1 + 0.8 * w.rng.random():.2f})"
        before.append(base + ".")
    if w.chance(noise.secondary):
        o2 = w.pick([x for x in OUTCOMES if x.kind != o.kind])
        after.append(f"Mean {o2.name} at {weeks} weeks were {w.value(o2)} in the {arm1} group "
                     f"and {w.value(o2)} in the {arm2} group.")
    if w.chance(noise.adverse):
        a, b = int(w.rng.integers(1, 20)), int(w.rng.integers(1, 20))
        after.append(f"Adverse events occurred in {a} of {n_pat // 2} patients "
                     f"({100 * a / max(1, n_pat // 2):.1f}%) in the {arm1} group and "
                     f"{b} of {n_pat - n_pat // 2} patients in the {arm2} group.")
    if w.chance(noise.pvalue):
        after.append(f"The difference between groups remained significant at "
                     f"{weeks} weeks ({w.pvalue()}).")
    results = before + [main + "."] + after
    if len(results) > 1 and w.chance(noise.shuffle):
        results = [results[i] for i in w.rng.permutation(len(results))]
    conclusion = (f"CONCLUSIONS: {_cap(arm1)} was more effective than {arm2} in lowering "
                  f"{name} in {disease}.")

    paragraphs = [
        title, objective,
        "METHOD: " + " ".join(methods),
        "RESULTS: " + " ".join(results),
        conclusion,
    ]
    if w.chance(noise.unstructured):
        paragraphs = [paragraphs[0], " ".join(p.split(": ", 1)[1] for p in paragraphs[1:])]
    return "\n".join(paragraphs)


def generate_synthetic(n: int, seed: int = 0,
                       noise: Union[str, NoiseConfig, dict, None] = "medium") -> List[Abstract]:
    """``n`` annotated synthetic abstracts, deterministic in ``seed``.

    ``noise`` is a preset name (``none``, ``low``, ``medium``, ``high``), a
    :class:`NoiseConfig`, or a dict of its fields.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cfg = noise_config(noise)
    rng = np.random.default_rng(seed)
    w = _Writer(rng, cfg)
    return [parse_annotated(_abstract_text(w), id=f"synth-{seed}-{i:04d}") for i in range(n)]


def synthetic_texts(n: int, seed: int = 0, noise="medium") -> List[str]:
    """Annotated source text of :func:`generate_synthetic` abstracts."""
    cfg = noise_config(noise)
    w = _Writer(np.random.default_rng(seed), cfg)
    return [_abstract_text(w) for _ in range(n)]
