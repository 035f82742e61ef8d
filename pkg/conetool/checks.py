# conetool/checks.py
from django.core.checks import Error, Warning, register
from django.conf import settings

from conetool.conf import BUILTIN_BUDGETS

# Orbit balls beyond this size are not tractable in exact arithmetic.
_LARGE_BUDGET_CAP = 10_000_000


def _is_positive_int(value):
    return isinstance(value, int) and not isinstance(value, bool) and value > 0


@register()
def conetool_settings_check(app_configs, **kwargs):
    errors = []

    cap = getattr(settings, "CONETOOL_BUDGET_CAP", None)
    if cap is not None:
        if not _is_positive_int(cap):
            errors.append(
                Error(
                    f"CONETOOL_BUDGET_CAP must be a positive integer, got {cap!r}.",
                    hint="Set CONETOOL_BUDGET_CAP to the maximum number of group elements "
                         "an orbit ball may hold, e.g. 100000.",
                    id="conetool.E001",
                )
            )
        elif cap > _LARGE_BUDGET_CAP:
            errors.append(
                Warning(
                    f"CONETOOL_BUDGET_CAP={cap} allows orbit balls with more than "
                    f"{_LARGE_BUDGET_CAP} elements.",
                    hint="Exact cone comparisons run once per ball element; "
                         "such balls will not finish in reasonable time.",
                    id="conetool.W001",
                )
            )

    budgets = getattr(settings, "CONETOOL_DEFAULT_BUDGETS", None)
    if budgets is not None:
        if not isinstance(budgets, dict):
            errors.append(
                Error(
                    "CONETOOL_DEFAULT_BUDGETS must be a dict.",
                    hint=f"Use a dict with keys among {sorted(BUILTIN_BUDGETS)}.",
                    id="conetool.E002",
                )
            )
        else:
            for key, value in budgets.items():
                if key not in BUILTIN_BUDGETS:
                    errors.append(
                        Error(
                            f"CONETOOL_DEFAULT_BUDGETS names unknown budget '{key}'.",
                            hint=f"Known budgets: {', '.join(sorted(BUILTIN_BUDGETS))}.",
                            id="conetool.E002",
                        )
                    )
                    continue

                # radius and seed may be zero; fuel and samples may not
                minimum = 0 if key in ("radius", "seed") else 1
                if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
                    errors.append(
                        Error(
                            f"CONETOOL_DEFAULT_BUDGETS['{key}'] must be an integer >= {minimum}, "
                            f"got {value!r}.",
                            id="conetool.E002",
                        )
                    )

    box = getattr(settings, "CONETOOL_SAMPLE_BOX", None)
    if box is not None and not _is_positive_int(box):
        errors.append(
            Error(
                f"CONETOOL_SAMPLE_BOX must be a positive integer, got {box!r}.",
                hint="The sampler draws lattice points from [-B, B]^n; 50 is the default.",
                id="conetool.E003",
            )
        )

    return errors
