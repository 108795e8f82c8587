from __future__ import annotations

import io
import json
from pathlib import Path

import pytest

from incite.ads import AdsClient, ReplayTransport
from incite.config import InciteConfig
from incite.server import StdioServer
from tests.conftest import FIXTURE_BIBCODE, REPLAY_DIR, placeholder_offset


@pytest.fixture
def server(project, replay_client):
    return StdioServer(client=replay_client, root=project, config=InciteConfig())


def call(server: StdioServer, method: str, params: dict, request_id=1):
    line = json.dumps({"jsonrpc": "2.0", "id": request_id, "method": method, "params": params})
    return server.handle_line(line)


def project_text(project: Path) -> str:
    return (project / "main.tex").read_text(encoding="utf-8")


class TestResolve:
    def test_fixture_doc_first_candidate(self, server, project):
        text = project_text(project)
        response = call(server, "overcite/resolve", {"text": text, "offset": placeholder_offset(text)})
        result = response["result"]
        assert response["id"] == 1
        assert result["candidates"][0]["bibcode"] == FIXTURE_BIBCODE
        assert result["cue"]["surname"] == "Shariat"
        assert result["cue"]["year"] == 2025
        assert result["widened"] is False
        assert len(result["candidates"]) <= 8

    def test_cursor_in_plain_text_is_32001(self, server, project):
        text = project_text(project)
        response = call(server, "overcite/resolve", {"text": text, "offset": 0})
        assert response["error"]["code"] == -32001

    def test_exhausted_widening_is_32004(self, server):
        text = "nothing found \\citep{Zzyzxq25}."
        response = call(server, "overcite/resolve", {"text": text, "offset": placeholder_offset(text, "Zzyzxq25")})
        assert response["error"]["code"] == -32004

    def test_max_results_truncates(self, server, project):
        text = project_text(project)
        response = call(
            server, "overcite/resolve",
            {"text": text, "offset": placeholder_offset(text), "max_results": 1},
        )
        assert len(response["result"]["candidates"]) == 1

    def test_authors_truncated_with_et_al(self, server, project):
        text = project_text(project)
        offset = placeholder_offset(text, "Abbott")
        response = call(server, "overcite/resolve", {"text": text, "offset": offset})
        authors = response["result"]["candidates"][0]["authors"]
        assert len(authors) <= 4
        for candidate in response["result"]["candidates"]:
            if len(candidate["authors"]) == 4:
                assert candidate["authors"][-1] == "et al."


class TestSelect:
    def select(self, server, project, request_id=2):
        text = project_text(project)
        return call(
            server,
            "overcite/select",
            {"text": text, "offset": placeholder_offset(text), "bibcode": FIXTURE_BIBCODE},
            request_id,
        )

    def test_select_writes_bib_returns_tex_edit(self, server, project):
        response = self.select(server, project)
        result = response["result"]
        assert result["final_key"] == "Shariat2025"
        edits = result["edits"]
        # tex edit returned, not applied: buffer belongs to the editor
        assert project_text(project).count("Shariat25") == 1
        span = (edits["tex_edit"]["start"], edits["tex_edit"]["end"])
        text = project_text(project)
        assert text.encode()[span[0] : span[1]] == b"Shariat25"
        assert edits["tex_edit"]["replacement"] == "Shariat2025"
        # bib written server-side
        assert "Shariat2025" in (project / "refs.bib").read_text()

    def test_no_bib_target_is_32006(self, server):
        text = "just \\citep{Shariat25} and no bibliography"
        response = call(
            server,
            "overcite/select",
            {"text": text, "offset": placeholder_offset(text), "bibcode": FIXTURE_BIBCODE},
        )
        assert response["error"]["code"] == -32006

    def test_repeat_select_reuses_entry(self, server, project):
        first = self.select(server, project)
        assert first["result"]["edits"]["reused_existing"] is False
        bib_bytes = (project / "refs.bib").read_bytes()
        second = self.select(server, project, request_id=3)
        assert second["result"]["edits"]["reused_existing"] is True
        assert second["result"]["final_key"] == "Shariat2025"
        assert (project / "refs.bib").read_bytes() == bib_bytes

    def test_key_style_override(self, server, project):
        text = project_text(project)
        response = call(
            server,
            "overcite/select",
            {
                "text": text,
                "offset": placeholder_offset(text),
                "bibcode": FIXTURE_BIBCODE,
                "key_style": "authoryear",
            },
        )
        assert response["result"]["final_key"] == "shariat2025"


class TestScan:
    def test_counts_unresolved(self, server, project):
        text = project_text(project)
        response = call(server, "overcite/scan", {"text": text})
        result = response["result"]
        assert len(result["sites"]) == 2
        # Hawking1975 exists in refs.bib; the two placeholders do not
        assert result["unresolved"] == ["Abbott", "Shariat25"]

    def test_empty_doc(self, server):
        response = call(server, "overcite/scan", {"text": ""})
        assert response["result"] == {"sites": [], "unresolved": []}

    def test_two_cites_one_in_bib(self, server):
        text = "\\citep{Hawking1975} and \\citep{Missing25}\n\\bibliography{refs}\n"
        response = call(server, "overcite/scan", {"text": text})
        assert response["result"]["unresolved"] == ["Missing25"]

    def test_without_bibliography_all_unresolved(self, server):
        response = call(server, "overcite/scan", {"text": "\\citep{A} \\citet{B}"})
        assert response["result"]["unresolved"] == ["A", "B"]


class TestConfig:
    def test_get_defaults(self, server):
        response = call(server, "overcite/config", {})
        result = response["result"]
        assert result["key_style"] == "AuthorYear"
        assert result["order_policy"] == "Append"
        assert result["default_mode"] == "contextual"
        assert "api_token" not in result

    def test_set_then_use(self, server, project):
        response = call(server, "overcite/config", {"set": {"key_style": "authoryear"}})
        assert response["result"]["key_style"] == "authoryear"
        text = project_text(project)
        select = call(
            server,
            "overcite/select",
            {"text": text, "offset": placeholder_offset(text), "bibcode": FIXTURE_BIBCODE},
        )
        assert select["result"]["final_key"] == "shariat2025"

    def test_invalid_enum_rejected(self, server):
        response = call(server, "overcite/config", {"set": {"order_policy": "bogus"}})
        assert response["error"]["code"] == -32602


class TestErrorMapping:
    def test_missing_token_is_32002(self, project):
        from incite.ads import HttpTransport

        server = StdioServer(
            client=AdsClient(token=None, transport=HttpTransport("http://127.0.0.1:1")),
            root=project,
            config=InciteConfig(),
        )
        text = project_text(project)
        response = call(server, "overcite/resolve", {"text": text, "offset": placeholder_offset(text)})
        assert response["error"]["code"] == -32002

    def test_rate_limited_is_32003_with_reset(self, project, corpus):
        from incite.ads import HttpTransport
        from incite.mockscix import MockScixServer

        mock = MockScixServer(corpus, limit=0, reset_at=1755000321).start()
        try:
            server = StdioServer(
                client=AdsClient(token="t", transport=HttpTransport(mock.base_url), retry_wait=0),
                root=project,
                config=InciteConfig(),
            )
            text = project_text(project)
            response = call(
                server, "overcite/resolve", {"text": text, "offset": placeholder_offset(text)}
            )
            assert response["error"]["code"] == -32003
            assert response["error"]["data"]["reset_at"] == 1755000321
        finally:
            mock.stop()


class TestModes:
    def test_simple_mode_orders_by_citations(self, server, project):
        text = project_text(project)
        response = call(
            server,
            "overcite/resolve",
            {"text": text, "offset": placeholder_offset(text), "mode": "simple"},
        )
        candidates = response["result"]["candidates"]
        counts = [c["citation_count"] for c in candidates]
        assert counts == sorted(counts, reverse=True)
        assert response["result"]["cue"]["mode"] == "simple"

    def test_widened_flag_reported(self, server):
        # Shariat26 finds nothing exact; the +/-1 year rung matches 2025 records
        text = "wide triples \\citep{Shariat26}."
        response = call(
            server, "overcite/resolve", {"text": text, "offset": placeholder_offset(text, "Shariat26")}
        )
        assert response["result"]["widened"] is True
        assert response["result"]["candidates"]


class TestFraming:
    def test_malformed_json_is_parse_error(self, server):
        response = server.handle_line("{nope")
        assert response["error"]["code"] == -32700
        assert response["id"] is None

    def test_non_object_request_invalid(self, server):
        response = server.handle_line("[1,2,3]")
        assert response["error"]["code"] == -32600

    def test_unknown_method(self, server):
        response = call(server, "overcite/nope", {})
        assert response["error"]["code"] == -32601

    def test_bad_params_type(self, server):
        response = call(server, "overcite/resolve", {"text": 42, "offset": 0})
        assert response["error"]["code"] == -32602

    def test_notification_gets_no_response(self, server):
        line = json.dumps({"jsonrpc": "2.0", "method": "overcite/scan", "params": {"text": ""}})
        assert server.handle_line(line) is None

    def test_fuzzed_frames_never_crash(self, server):
        frames = [
            "", "null", "42", '"str"', "{}", '{"id": 1}', '{"method": 7, "id": 1}',
            '{"jsonrpc":"2.0","id":2,"method":"overcite/resolve","params":{"offset":"x"}}',
            '{"jsonrpc":"2.0","id":3,"method":"overcite/resolve","params":null}',
            "\x00\x01\x02",
        ]
        for frame in frames:
            response = server.handle_line(frame)
            if response is not None:
                assert "error" in response
                assert response["jsonrpc"] == "2.0"

    def test_serve_forever_over_streams(self, project):
        requests = [
            {"jsonrpc": "2.0", "id": "a", "method": "overcite/scan", "params": {"text": "\\citep{K}"}},
            {"jsonrpc": "2.0", "id": "b", "method": "overcite/config", "params": {}},
        ]
        instream = io.StringIO("\n".join(json.dumps(r) for r in requests) + "\nnot json\n")
        outstream = io.StringIO()
        server = StdioServer(
            client=AdsClient(transport=ReplayTransport(REPLAY_DIR)),
            root=project,
            config=InciteConfig(),
            instream=instream,
            outstream=outstream,
        )
        server.serve_forever()
        lines = [json.loads(line) for line in outstream.getvalue().splitlines()]
        assert [r.get("id") for r in lines] == ["a", "b", None]
        assert lines[2]["error"]["code"] == -32700
