"""
Mailing lists against global sampling
=====================================

Twenty users share ten favourite items out of a thousand. A mailing list
lets the first lucky sampler tell everyone else. The baseline has each user
sample alone or ask a random stranger.
"""

import numpy as np

from sfnrec import ProtocolConfig, predict_baseline, predict_mailing_list, reference_scenario
from sfnrec.protocols import run_baseline, run_mailing_list

seeds = range(100)
mail = [run_mailing_list(reference_scenario(s), ProtocolConfig("mailing_list", seed=s)) for s in seeds]
base = [run_baseline(reference_scenario(s), ProtocolConfig("baseline", seed=s)) for s in seeds]

scenario = reference_scenario(0)
for name, runs, pred in (("mailing list", mail, predict_mailing_list(scenario)),
                         ("baseline", base, predict_baseline(scenario))):
    print(name)
    print(f"  samples  {np.mean([m.total_samples for m in runs]):8.2f}   predicted {pred.samples:8.2f}")
    print(f"  messages {np.mean([m.messages for m in runs]):8.2f}   predicted {pred.messages:8.2f}")
    print(f"  spam     {np.mean([m.spam for m in runs]):8.2f}   predicted {pred.spam:8.2f}")

# samples pooled across the group before the first shared item turns up
print(f"mean samples to first shared item: {np.mean([m.trace_length for m in mail]):.1f} (expected 100)")
