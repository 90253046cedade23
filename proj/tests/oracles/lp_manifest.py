#!/usr/bin/env python3
"""Expected LP variable/row counts for a dataset, walked independently from
the dataset file (never from the C++ assembler).

Usage: python3 tests/oracles/lp_manifest.py data/mini_be.json \
           > tests/data/mini_be_lp_manifest.json

The counts cover the full-window (2020-2050) no-event baseline LP.
"""
import json
import sys

YEARS = list(range(2020, 2055, 5))
DECISION_YEARS = YEARS[1:]
IMPACT_YEARS = [2035, 2040, 2045, 2050]


def main(path: str) -> None:
    ds = json.load(open(path))
    techs = ds["technologies"]
    slices = ds["slices"]
    resources = ds["resources"]
    n_s = len(slices)

    def active_slices(t):
        n = 0
        for s in range(n_s):
            for coefs in t["layer_outputs"].values():
                vals = coefs if isinstance(coefs, list) else [coefs] * n_s
                if vals[s] != 0:
                    n += 1
                    break
        return n

    def decommission_pairs(t):
        life = 5 * t["lifetime_phases"]
        pairs = 0
        for v in YEARS[:-1]:
            pairs += sum(1 for p in DECISION_YEARS if v < p < v + life)
        return pairs

    def vintage_rows(t):
        life = 5 * t["lifetime_phases"]
        rows = 0
        for v in YEARS[:-1]:
            if any(v < p < v + life for p in DECISION_YEARS):
                rows += 1
        return rows

    layers = set()
    for t in techs:
        layers |= set(t["layer_outputs"]) | set(t.get("layer_inputs", {}))
        if "storage" in t:
            layers.add(t["storage"]["layer"])
    layers |= {r["layer"] for r in resources}
    layers |= {d["layer"] for d in ds["demands"]}

    op_slices = sum(active_slices(t) for t in techs)
    n_storage = sum(1 for t in techs if "storage" in t)
    special = [t for t in techs
               if t.get("flags", {}).get("unicorn_class", "none") != "none"
               or t.get("flags", {}).get("nuclear_class", "none") != "none"]
    renewables = [t for t in techs
                  if t.get("flags", {}).get("renewable_class", "none") != "none"]
    heating = [t for t in techs
               if t.get("flags", {}).get("heating_class", "none") in ("lt_decentral", "lt_dhn")]
    passenger = [t for t in techs
                 if t.get("flags", {}).get("mobility_class", "none") == "passenger"]
    freight = [t for t in techs
               if t.get("flags", {}).get("mobility_class", "none") == "freight"]
    turnover_classes = sum(1 for g in (heating, passenger, freight) if g)

    variables = {
        "capacity": len(techs) * len(YEARS),
        "addition": len(techs) * len(DECISION_YEARS),
        "decommission": sum(decommission_pairs(t) for t in techs),
        "operation": op_slices * len(YEARS),
        "resource": len(resources) * len(YEARS) * n_s,
    }
    if n_storage:
        for kind in ("storage_charge", "storage_discharge", "storage_level"):
            variables[kind] = n_storage * len(YEARS) * n_s
    rows = {
        "continuity": len(techs) * len(DECISION_YEARS),
        "vintage": sum(vintage_rows(t) for t in techs),
        "capacity_link": op_slices * len(YEARS),
        "balance": len(layers) * len(YEARS) * n_s,
        "availability": len(resources) * len(YEARS),
        "ghg": len(YEARS),
        "potential": len(special) * len(YEARS),
        "resistance": len(renewables) * len(IMPACT_YEARS),
        "turnover": turnover_classes * len(DECISION_YEARS),
    }
    if n_storage:
        rows["storage_cycle"] = n_storage * len(YEARS) * n_s
        rows["storage_cap"] = n_storage * len(YEARS) * n_s

    manifest = {
        "dataset": path.split("/")[-1],
        "window": [YEARS[0], YEARS[-1]],
        "variables": variables,
        "total_variables": sum(variables.values()),
        "rows": rows,
        "total_rows": sum(rows.values()),
    }
    json.dump(manifest, sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main(sys.argv[1])
