"""Link handling end to end: find URLs in text, strip a page to plain text,
and squeeze it under a token budget with the extractive summarizer.

    python demos/retrieve_and_summarize.py
"""

from fingract.ucr import build_links_content, extract_urls, strip_html, summarize

EXPLANATION = (
    "The film premiered in 2015, not 2017. "
    "See https://en.wikipedia.org/wiki/Junun_(film). "
    "Background: https://example.org/festivals/2015, https://example.org/festivals/2015"
)

PAGE = """<html>
<head><title>Delta geography</title><style>p { color: green; }</style></head>
<body>
<script>analytics.track("pageview");</script>
<h1>Life on the delta</h1>
<p>The river delta floods every spring.</p>
<p>Birds migrate across the delta in huge flocks.</p>
<p>The delta soil is rich because the river deposits silt.</p>
<p>Local farmers plant rice after the flood recedes.</p>
<p>Fishing boats crowd the delta channels at dawn.</p>
<p>The spring flood carries silt from the mountains.</p>
<p>Tourists visit the delta wetlands to watch birds.</p>
<p>Rice paddies cover most of the lower delta plain.</p>
<p>The river delta supports farmers, fishers, and birds alike.</p>
<p>Dams upstream now trap part of the silt.</p>
</body></html>"""


def main() -> None:
    print("URLs found in the explanation (deduplicated, punctuation trimmed):")
    for url in extract_urls(EXPLANATION):
        print(f"  {url}")

    text = strip_html(PAGE)
    print(f"\nStripped page text ({len(text.split())} tokens):")
    for line in text.split("\n"):
        print(f"  {line}")

    for budget in (18, 30):
        summary = summarize(text, budget)
        print(f"\nSummary under a {budget}-token budget ({len(summary.split())} tokens):")
        print(f"  {summary}")

    print("\nAnnotated block for an explanation with no links at all:")
    print(f"  {build_links_content([])}")


if __name__ == "__main__":
    main()
