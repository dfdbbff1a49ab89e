"""
Validating single responses over HTTP
=====================================

Start the validation endpoint in a background thread and send it two
responses.  The endpoint runs the same scoring code as the batch filter.
"""
import json
import threading
import urllib.request

from integrity_kit import data
from integrity_kit.models import ForestConfig
from integrity_kit.pipeline import PipelineConfig, run_training
from integrity_kit.server import ValidationService, make_server
from integrity_kit.synth import SynthConfig, generate_dataset

schema = data.example_schema()
rules = data.example_rules()
raws, labels = generate_dataset(schema, SynthConfig(n=300, fake_fraction=0.15, seed=5), rules=rules)
trained, _ = run_training(schema, raws, labels, rules,
                          PipelineConfig(model_kind="rf", model_config=ForestConfig(n_trees=50, seed=5), seed=5))

# %%
# Port 0 asks the OS for a free port.
server = make_server(ValidationService(trained, schema, rules), port=0)
threading.Thread(target=server.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{server.server_address[1]}"


def post(answers):
    req = urllib.request.Request(base + "/v1/validate", data=json.dumps({"answers": answers}).encode(), method="POST")
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read())


with urllib.request.urlopen(base + "/v1/health") as resp:
    print(json.loads(resp.read()))

# %%
# A genuine response from the training corpus, then one that claims to have
# no ERP system while naming its vendor.
genuine = next(r for r, y in zip(raws, labels) if y == 0)
print(post(genuine.answers))
print(post({"erp_usage": "No ERP system used", "primary_erp": "SAP", "ai_expectations": "n/a"}))

server.shutdown()
server.server_close()
