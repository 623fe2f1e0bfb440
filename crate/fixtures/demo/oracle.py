"""Independent spreadsheet-style computation of the demo audit.

Reads the raw fixture files with pandas and writes expected.json, which the
acceptance suite compares against the pipeline's artifacts.

    python3 oracle.py
"""

import json
import math
import re
from pathlib import Path

import pandas as pd

HERE = Path(__file__).parent


def read(name):
    return pd.read_csv(HERE / name, dtype=str, keep_default_na=False)


occ = read("occupations.csv")
occ = occ[occ.excluded_kind == ""].copy()
feor = read("categories_feor.csv").set_index("code")
soc = read("categories_soc.csv").set_index("code")
cross = read("crosswalk.csv")
survey = read("survey.csv").set_index("occupation_id")
adjectives = read("adjectives.csv")

tsv = dict(
    line.split("\t", 1)
    for line in (HERE / "translations.tsv").read_text(encoding="utf-8").splitlines()
)


def label(text):
    words = re.findall(r"[a-z']+", text.lower())
    he = any(w in ("he", "he's") for w in words)
    she = any(w in ("she", "she's") for w in words)
    if he and she:
        return "ambiguous"
    if he:
        return "masculine"
    if she:
        return "feminine"
    return "other"


variants = {"base": None}
variants.update({r.id: r.text for r in adjectives.itertuples()})
labels = {}
for v, text in variants.items():
    labels[v] = {}
    for r in occ.itertuples():
        src = f"ő egy {r.name_source}" if text is None else f"ő egy {text} {r.name_source}"
        labels[v][r.id] = label(tsv[src])


def soc_code(r):
    if r.soc_code:
        return r.soc_code
    rows = cross[cross.feor_code == r.feor_code]
    if (rows.override == "1").any():
        rows = rows[rows.override == "1"]
    return rows.soc_code.iloc[0] if len(rows) == 1 else None


occ["soc"] = [soc_code(r) for r in occ.itertuples()]


def pct(table, code):
    if code is None or code not in table.index or table.loc[code, "female_pct"] == "":
        return None
    return float(table.loc[code, "female_pct"]) / 100.0


def femininity(c):
    c = [int(x) for x in c]
    w = [2.5, 1.5, 0.5, 0.5, 1.5, 2.5]
    s = sum(a * b for a, b in zip(w, c))
    return (0.5 * c[3] + 1.5 * c[4] + 2.5 * c[5]) / s


shares = {
    "source": {r.id: pct(feor, r.feor_code) for r in occ.itertuples()},
    "target": {r.id: pct(soc, r.soc) for r in occ.itertuples()},
    "perception": {
        r.id: femininity(survey.loc[r.id]) if r.id in survey.index else None
        for r in occ.itertuples()
    },
}
group_table = {"source": feor, "target": soc, "perception": feor}
group_col = {"source": "feor_code", "target": "soc", "perception": "feor_code"}


def bias(lab, f):
    e_t = 100 * (f if lab == "masculine" else 1 - f)
    e_o = 100 * min(f, 1 - f)
    if e_o == 0:
        return 0.0 if e_t == 0 else math.inf
    return (e_t - e_o) / e_o


def direction(lab, f):
    if lab == "masculine" and f > 0.5:
        return "against_women"
    if lab == "feminine" and f < 0.5:
        return "against_men"
    return "none"


expected = {"references": {}}
base = labels["base"]
for ref, sh in shares.items():
    rows = []
    for r in occ.itertuples():
        f = sh[r.id]
        lab = base[r.id]
        if f is None or lab not in ("masculine", "feminine"):
            continue
        rows.append(
            dict(id=r.id, sector=r.sector_id, group=getattr(r, group_col[ref]),
                 f=f, b=bias(lab, f), d=direction(lab, f))
        )
    df = pd.DataFrame(rows)
    members = df.groupby("group").id.count()
    df["w"] = [
        float(group_table[ref].loc[g, "employment_count"]) / members[g] for g in df.group
    ]
    df["dom"] = ["female_dominated" if f > 0.5 else "male_dominated" if f < 0.5 else "tied"
                 for f in df.f]
    wrong = df[df.d != "none"]
    pos = df[(df.b > 0) & (df.b != math.inf)].b.sort_values()
    fem = df[df.dom == "female_dominated"]
    mal = df[df.dom == "male_dominated"]

    sectors = []
    for (sector, dom), g in df[df.dom != "tied"].groupby(["sector", "dom"]):
        fin = g[g.b != math.inf]
        wb = (fin.b * fin.w).sum() / fin.w.sum() if len(fin) else None
        sectors.append(dict(sector_id=sector, dominance=dom, weighted_bias=wb,
                            n_occupations=len(g), unbounded_count=int((g.b == math.inf).sum())))

    expected["references"][ref] = dict(
        scoreable=len(df),
        wrong=len(wrong),
        he_for_she=int((df.d == "against_women").sum()),
        she_for_he=int((df.d == "against_men").sum()),
        wrong_fraction=len(wrong) / len(df),
        p_wrong_given_female_dominated=(fem.d != "none").mean(),
        p_wrong_given_male_dominated=(mal.d != "none").mean(),
        bias_min=float(pos.min()),
        bias_median=float(pos.median()),
        bias_max=float(pos.max()),
        unbounded_count=int((df.b == math.inf).sum()),
        sectors=sectors,
        occupations={r.id: ("unbounded" if r.b == math.inf else r.b) for r in df.itertuples()},
    )

changes = {}
for v in variants:
    if v == "base":
        continue
    cells = {"she_to_she": 0, "he_to_he": 0, "she_to_he": 0, "he_to_she": 0}
    for oid, before in base.items():
        after = labels[v][oid]
        key = {("feminine", "feminine"): "she_to_she", ("masculine", "masculine"): "he_to_he",
               ("feminine", "masculine"): "she_to_he", ("masculine", "feminine"): "he_to_she"}
        if (before, after) in key:
            cells[key[(before, after)]] += 1
    cells["paired"] = sum(cells.values())
    changes[v] = cells
expected["change_matrices"] = changes

expected["pronoun_distribution"] = {
    v: {
        "masculine": sum(l == "masculine" for l in labs.values()) / len(labs),
        "feminine": sum(l == "feminine" for l in labs.values()) / len(labs),
        "other": sum(l not in ("masculine", "feminine") for l in labs.values()) / len(labs),
    }
    for v, labs in labels.items()
}

both = [(shares["perception"][i], shares["source"][i]) for i in occ.id
        if shares["perception"][i] is not None and shares["source"][i] is not None]
pairs = pd.DataFrame(both, columns=["perceived", "census"])
expected["perception_correlation"] = float(pairs.perceived.corr(pairs.census))
expected["perception_pairs"] = len(pairs)

(HERE / "expected.json").write_text(json.dumps(expected, indent=2, sort_keys=True) + "\n")
print(json.dumps({k: {x: v[x] for x in ("scoreable", "wrong", "he_for_she", "unbounded_count")}
                  for k, v in expected["references"].items()}))
print(json.dumps(changes))
