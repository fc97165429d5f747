import json
import os
import re
import socket
import subprocess
import sys
import tempfile
import time
import unittest
import urllib.request

import jsonschema

GORENET = os.path.abspath(sys.argv.pop(1) if len(sys.argv) > 2 else "build/gorenet")
ROOT = sys.argv.pop(1) if len(sys.argv) > 1 else "."
MODEL = os.path.join(ROOT, "corpus", "osn-case-study.gnet")
JUDGMENTS = os.path.join(ROOT, "corpus", "paper-judgments.gnet")


def gorenet(*args, stdin=None, cwd=None):
    return subprocess.run([GORENET, *args], capture_output=True, text=True, input=stdin, timeout=60, cwd=cwd)


def schema(name):
    with open(os.path.join(ROOT, "schema", name)) as f:
        return json.load(f)


def marking_lines(text):
    return [l for l in text.splitlines() if re.match(r"M\d+ = <", l)]


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class Validate(unittest.TestCase):
    def test_corpus_is_valid(self):
        r = gorenet("validate", MODEL)
        self.assertEqual(r.returncode, 0, r.stderr)

    def test_json_report(self):
        r = gorenet("validate", MODEL, "--json")
        doc = json.loads(r.stdout)
        jsonschema.validate(doc, schema("validate.v1.json"))
        self.assertTrue(doc["valid"])

    def test_errors_exit_one_with_positions(self):
        with tempfile.NamedTemporaryFile("w", suffix=".gnet", delete=False) as f:
            f.write("net {\n  place p1\n  trans t1\n  arc t1 -> p9\n}\n")
        try:
            r = gorenet("validate", f.name)
            self.assertEqual(r.returncode, 1)
            self.assertIn(f.name + ":4:13: error:", r.stdout + r.stderr)
            doc = json.loads(gorenet("validate", f.name, "--json").stdout)
            jsonschema.validate(doc, schema("validate.v1.json"))
            self.assertFalse(doc["valid"])
            self.assertEqual(doc["diagnostics"][0]["code"], "unknown-place")
        finally:
            os.unlink(f.name)

    def test_missing_file_is_environment_failure(self):
        self.assertEqual(gorenet("validate", "/nonexistent/model.gnet").returncode, 2)

    def test_bad_usage(self):
        self.assertEqual(gorenet().returncode, 2)
        self.assertEqual(gorenet("frobnicate").returncode, 2)
        self.assertEqual(gorenet("simulate", MODEL, "--rounds", "many").returncode, 2)


class Simulate(unittest.TestCase):
    def test_golden_markings(self):
        r = gorenet("simulate", MODEL)
        self.assertEqual(r.returncode, 0, r.stderr)
        lines = marking_lines(r.stdout)
        self.assertEqual(len(lines), 9)
        self.assertTrue(lines[0].startswith("M0 = <1,0,0,0,0,0,0,0,0,0,0,0,0,0,0>"))
        self.assertEqual(len(lines[1:]), 8)
        self.assertTrue(lines[-1].startswith("M8 = <0,1,0,0,0,0,0,0,0,0,0,1,1,1,1>"))
        self.assertIn("Generate more content: +1", r.stdout)
        self.assertIn("Mitigate information overload: -1", r.stdout)

    def test_rounds(self):
        r = gorenet("simulate", MODEL, "--rounds", "3")
        self.assertIn("Encourage dynamics: +3", r.stdout)
        self.assertIn("Mitigate information overload: -3", r.stdout)
        r = gorenet("simulate", MODEL, "--rounds", "0")
        self.assertEqual(marking_lines(r.stdout),
                         ["M0 = <1,0,0,0,0,0,0,0,0,0,0,0,0,0,0>"])

    def test_named_and_inline_scripts(self):
        r = gorenet("simulate", MODEL, "--script", "not-notify")
        self.assertIn("M2 = <0,0,1,0,0,0,0,0,0,0,0,0,0,0,0>", r.stdout)
        self.assertIn("Generate more content: 0", r.stdout)
        r = gorenet("simulate", MODEL, "--script", "t0,t9")
        self.assertEqual(r.returncode, 1)
        self.assertIn("step 1", r.stderr)

    def test_json_trace(self):
        doc = json.loads(gorenet("simulate", MODEL, "--json", "--rounds", "2").stdout)
        jsonschema.validate(doc, schema("trace.v1.json"))
        self.assertEqual(doc["roundsCompleted"], 2)
        self.assertEqual(doc["markings"][8], [0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1])
        failed = json.loads(gorenet("simulate", MODEL, "--json", "--script", "t0,t9").stdout)
        jsonschema.validate(failed, schema("trace.v1.json"))
        self.assertEqual(failed["error"]["step"], 1)

    def test_corpus_lookup_by_name(self):
        self.assertEqual(gorenet("simulate", "osn-case-study.gnet", cwd=tempfile.gettempdir()).returncode, 0)


class Evaluate(unittest.TestCase):
    def test_reply(self):
        r = gorenet("evaluate", MODEL, "--scenario", "reply", "--judgments", JUDGMENTS)
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertIn("Encourage dynamics: S\n", r.stdout)
        self.assertIn("Maintain desire to use OSN: PS\n", r.stdout)
        self.assertIn("Mitigate information overload: D\n", r.stdout)

    def test_no_reply_and_not_notify(self):
        r = gorenet("evaluate", MODEL, "--scenario", "no-reply", "--judgments", JUDGMENTS)
        self.assertIn("Encourage dynamics: PD\n", r.stdout)
        self.assertIn("Gather reply ETI: D\n", r.stdout)
        r = gorenet("evaluate", MODEL, "--scenario", "not-notify", "--judgments", JUDGMENTS)
        self.assertIn("Encourage dynamics: D\n", r.stdout)

    def test_pending_judgments_exit_one(self):
        r = gorenet("evaluate", MODEL, "--scenario", "reply")
        self.assertEqual(r.returncode, 1)
        self.assertIn('"Encourage dynamics" given {PS, PS, PD}', r.stdout + r.stderr)

    def test_unknown_scenario(self):
        self.assertEqual(gorenet("evaluate", MODEL, "--scenario", "nope").returncode, 1)

    def test_json(self):
        for args in (["--judgments", JUDGMENTS], []):
            r = gorenet("evaluate", MODEL, "--scenario", "reply", "--json", *args)
            doc = json.loads(r.stdout)
            jsonschema.validate(doc, schema("evaluation.v1.json"))
        self.assertEqual(doc["status"], "unresolved-judgments")
        self.assertTrue(doc["pending"])

    def test_interactive_answers_are_saved(self):
        with tempfile.TemporaryDirectory() as d:
            session = os.path.join(d, "answers.gnet")
            r = gorenet("evaluate", MODEL, "--scenario", "reply", "--interactive", "--session-file", session,
                        stdin="S\n" * 10)
            self.assertEqual(r.returncode, 0, r.stderr)
            with open(session) as f:
                saved = f.read()
            self.assertIn('judgment "Encourage dynamics" given {PS, PS, PD} => S', saved)
            again = gorenet("evaluate", MODEL, "--scenario", "reply", "--judgments", session)
            self.assertEqual(again.returncode, 0, again.stderr)
            self.assertEqual(again.stdout, r.stdout)


class Backward(unittest.TestCase):
    def test_text_and_json(self):
        r = gorenet("backward", MODEL, "--target", "Encourage dynamics", "--label", "S", "--judgments", JUDGMENTS)
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertRegex(r.stdout, r"^\d+ assignment\(s\) give Encourage dynamics = S")
        doc = json.loads(gorenet("backward", MODEL, "--target", "encourage-dynamics", "--label", "S",
                                 "--judgments", JUDGMENTS, "--json").stdout)
        jsonschema.validate(doc, schema("backward.v1.json"))
        reply = {"decide-to-not-notify": "D", "decide-to-notify": "S",
                 "do-not-react-to-user-s-eti": "D", "react-to-user-s-eti": "S"}
        self.assertIn(reply, [s["labels"] for s in doc["solutions"]])

    def test_errors(self):
        self.assertEqual(gorenet("backward", MODEL, "--target", "nope", "--label", "S").returncode, 1)
        self.assertEqual(gorenet("backward", MODEL, "--target", "Encourage dynamics", "--label", "Q").returncode, 2)


class Export(unittest.TestCase):
    def test_json_matches_schema(self):
        doc = json.loads(gorenet("export", MODEL, "--format", "json").stdout)
        jsonschema.validate(doc, schema("model.v1.json"))
        self.assertEqual(doc["net"]["marking"], [1] + [0] * 14)

    def test_dot_layers(self):
        for layer in ("goal", "net", "hybrid"):
            r = gorenet("export", MODEL, "--format", "dot", "--layer", layer)
            self.assertEqual(r.returncode, 0, r.stderr)
            self.assertTrue(r.stdout.startswith("digraph " + layer + " {"))

    def test_empty_model(self):
        with tempfile.NamedTemporaryFile("w", suffix=".gnet", delete=False) as f:
            f.write("")
        try:
            r = gorenet("export", f.name, "--format", "json")
            self.assertEqual(r.stdout.strip(), '{"actors":[],"elements":[],"links":[],"net":null,"bindings":[]}')
            self.assertEqual(gorenet("export", f.name, "--format", "dot", "--layer", "net").returncode, 1)
        finally:
            os.unlink(f.name)


class Serve(unittest.TestCase):
    def start(self, port):
        proc = subprocess.Popen([GORENET, "serve", "--port", str(port)], stdout=subprocess.DEVNULL,
                                stderr=subprocess.DEVNULL)
        self.addCleanup(lambda: proc.poll() is None and proc.kill())
        deadline = time.time() + 10
        while time.time() < deadline:
            try:
                with urllib.request.urlopen(f"http://127.0.0.1:{port}/health", timeout=1) as r:
                    return proc, json.load(r)
            except OSError:
                if proc.poll() is not None:
                    return proc, None
                time.sleep(0.05)
        return proc, None

    def test_health_and_shutdown(self):
        port = free_port()
        proc, health = self.start(port)
        self.assertEqual(health, {"status": "ok"})
        with open(MODEL, "rb") as f:
            req = urllib.request.Request(f"http://127.0.0.1:{port}/models", data=f.read(), method="POST")
        with urllib.request.urlopen(req, timeout=5) as r:
            self.assertEqual(r.status, 201)
            jsonschema.validate(json.load(urllib.request.urlopen(f"http://127.0.0.1:{port}/models/m1")),
                                schema("model.v1.json"))
        proc.terminate()
        self.assertEqual(proc.wait(timeout=10), 0)

    def test_busy_port(self):
        with socket.socket() as s:
            s.bind(("127.0.0.1", 0))
            s.listen()
            r = gorenet("serve", "--port", str(s.getsockname()[1]))
        self.assertEqual(r.returncode, 2)


if __name__ == "__main__":
    unittest.main(verbosity=2)
