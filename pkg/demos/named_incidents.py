"""
Three public incidents under the same protocol
==============================================

Each incident is encoded from its public postmortem. The postmortem regime
can at best partially fill inputs and post-condition state, and none of the
write-ups records a policy snapshot or a scoped delegation. The result is
the same 2/2/2/1 profile for all three.
"""

from tracerecon.core import IMPLEMENTATION_ROWS
from tracerecon.evalharness import load_incidents, run_incident

for fixture in load_incidents():
    report = run_incident(fixture)
    print(f"\n{fixture.incident_id}: {fixture.metadata['title']}")
    print(f"  completeness {100 * report.completeness:.2f}%")
    for row in IMPLEMENTATION_ROWS:
        print(f"  {row:38s} {report.verdicts[row].tag}")
    for source in fixture.metadata["sources"]:
        print(f"  source: {source['citation']}\n          {source['url']}")
