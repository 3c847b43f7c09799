import pytest

from stageboard.textrecords import RecordFormatError, parse_records

SAMPLE = """\
format: sample/1
# a comment

record: widget
name: first
label>  padded  value
notes<<
line one

line three
>>

record: widget
name: second
"""


def test_file_level_meta_before_first_record():
    parsed = parse_records(SAMPLE)
    assert parsed.meta == {"format": "sample/1"}


def test_records_split_on_record_lines():
    parsed = parse_records(SAMPLE)
    assert [r["record"] for r in parsed.records] == ["widget", "widget"]
    assert parsed.records[1]["name"] == "second"


def test_colon_values_are_stripped():
    parsed = parse_records("record: r\nkey:   spaced value   \n")
    assert parsed.records[0]["key"] == "spaced value"


def test_arrow_values_keep_bytes_after_delimiter():
    parsed = parse_records(SAMPLE)
    assert parsed.records[0]["label"] == " padded  value"


def test_block_values_join_inner_lines():
    parsed = parse_records(SAMPLE)
    assert parsed.records[0]["notes"] == "line one\n\nline three"


def test_comment_lines_inside_blocks_are_content():
    parsed = parse_records("record: r\nbody<<\n# not a comment\n>>\n")
    assert parsed.records[0]["body"] == "# not a comment"


def test_unterminated_block_is_an_error():
    with pytest.raises(RecordFormatError, match="unterminated"):
        parse_records("record: r\nbody<<\nabc\n")


def test_unparseable_line_reports_source_and_line():
    with pytest.raises(RecordFormatError, match=r"things\.txt:2"):
        parse_records("record: r\nno delimiter here\n", source="things.txt")


def test_arrow_value_may_contain_colons():
    parsed = parse_records("record: r\ntext> a: b: c\n")
    assert parsed.records[0]["text"] == "a: b: c"
