# signals.py
from django.dispatch import Signal

# Fired once for every certificate placed in a command report, after the
# certificate has been fully computed and serialized.
#
# Kwargs sent:
# - certificate: dict (the JSON form of the certificate)
# - command: str (the command that produced it, e.g. "tile-check")
# - scenario_digest: str (sha256 of the scenario file contents)
certificate_issued = Signal()
