"""Prompt bodies used by the pipeline stages, the baseline judges, and the
generation flows for the bias-study corpus.

These are load-bearing strings: the golden-file tests pin them byte for
byte, including their idiosyncratic spacing and wording.  Do not reflow,
"fix", or reformat them.
"""

from __future__ import annotations

from .gateway import PromptTemplate

SEGMENT_CLAIM = PromptTemplate(
    id="segment_claim",
    body="""You will receive a claim, and some trustworthy reliable information called evidence.  Your task is to divide the claim into multiple smaller subclaims/ atomic claims , then assess the factuality of each subclaim sentence based on the information provided in the evidence:

- no error: the subclaim aligns explicitly with the content of the evidence and is factually consistent with it.
- factuality error: the subclaim contains any factuality error.

Instruction:
First, compare each subclaim sentence with the evidence. Second, provide a single sentence explaining the factuality error in the subclaim and how to correct it based on the evidence.

Provide your answer in JSON format. Your answer should strictly be a list of dictionaries whose keys are "sentence", "reason" and "correction". An example of your output should be:

[{"sentence": "first  subclaim", "reason": "your reason", "correction": "your correction"},
{"sentence": "second  subclaim", "reason": "your reason", "correction": "your correction"}]

Claim:
{claim}
Evidence:
{evidence}""",
)

JUDGE_EXPLANATION = PromptTemplate(
    id="judge_explanation",
    body="""You will receive a list of errors, their corrections, and a transcript called the 'explanation'. Your task is to assess if each of the errors can be inferred from the explanation, and if the corrections can be inferred from the explanation as well.

Instruction:

First, compare each error with the explanation.
Second, check if the error is inferred from the explanation and then respond "Yes" or "No" for each detected error explicitly mentioned in the explanation.
Third, compare each correction with the explanation.
Fourth, check if the correction is inferred from the explanation and then respond with "Yes" or "No" for each detected correction.
Fifth, based on your knowledge, check if there are credible and relevant web links in the explanation supporting the correction, and then respond with "Yes" or "No".

Provide your answer in JSON format. The answer should be a list of dictionaries whose keys are "error", "response", "correction", and "supporting_links". An example of your output:

[ {"error": "first error", "response": "Yes", "correction": "Yes", "supporting_links": "Yes"},
{"error": "second error", "response": "No", "correction": "Yes", "supporting_links": "No"},
{"error": "third error", "response": "Yes", "correction": "No", "supporting_links": "No"} ]

List of errors:
{error_list}

Corrections:
{corrections_list}

Explanation:
{explanation}""",
)

JUDGE_EXPLANATION_WITH_LINKS = PromptTemplate(
    id="judge_explanation_with_links",
    body="""You will receive a list of errors, their corrections, and a transcript called the 'explanation'. Your task is to assess if each of the errors is can be inferred from the explanation, and if the corrections can be inferred from the explanation as well.

Instruction:

First, compare each error with the explanation.
Second, check if the error is inferred from the explanation and then response "Yes" or "No" for each detected error explicitly mentioned in the explanation.
Third, compare each correction with the explanation.
Fourth, check if the correction is inferred from the explanation and then respond with "Yes" or "No".
Fifth, check if there are working web links in the explanation. The links content will mention if the link is working or not, and then respond with "Yes" or "No".
Sixth, check the provided content of these web links, if the content is related, and then respond with "Yes" or "No".
Seventh, check the provided content of these web links, if the content supports the correction, and then respond with "Yes" or "No".

Provide your answer in JSON format. The answer should be a list of dictionaries whose keys are "error", "response", "correction", and "supporting_links".
An example of your output: [{"error": "first error", "response": "Yes", "correction": "Yes", "existing_links": "Yes", "related_links": "Yes", "supporting_links": "Yes"},
{"error": "second error", "response": "No", "correction": "Yes", "existing_links": "Yes", "related_links": "No", "supporting_links": "No"},
{"error": "third error", "response": "Yes", "correction": "No",  "existing_links": "Yes", "related_links": "Yes", "supporting_links": "No"}]

List of errors:
{errors_list}

Corrections:
{corrections_list}

Explanation:
{explanation}

Links content:
{links_content}""",
)

GEVAL_ACTIONABILITY = PromptTemplate(
    id="geval_actionability",
    body="""You will be given a claim, some credible information called the evidence, a label that shows whether the claim is true or false, and an explanation for the label.

Your task is to evaluate the explanation on one metric.

Please make sure you read and understand these instructions carefully. Please keep this document open while reviewing, and refer to it as needed.

Evaluation Criteria:

Actionability (0-5) - misinformation detection and factual correction backed up by credible sources. The explanation should provide an indication of which parts of the claim include misalignment with the evidence.In addition, the explanation should provide a corrected version of the erroneous claim.

Evaluation Steps:

1. Read the claim, evidence and the explanations carefully.

2. Compare the claim with the evidence and identify the errors or misalignment parts between the claim and the evidence.

3. Assess how well the explanations cover the errors detected, the supporting sources provided, and the degree of error correction of the claim in each explanation.

4.If there is a link in the explanation, assess if the content of the link -based on your knowledge- is both relevant and supporting to the explanation.

5. Assign a score from 1 to 5 to the metric.

6. Your output should be scores only.

Claim:

{claim}

Evidence:

{evidence}

Label:

{label}

Explanation:

{explanation}

Evaluation Form (scores ONLY):
- Actionability:""",
)

GEVAL_ACTIONABILITY_WITH_LINKS = PromptTemplate(
    id="geval_actionability_with_links",
    body="""You will be given a claim, some credible information called the evidence, a label that shows whether the claim is true or false, and an explanation for the label. The explanation might have a link. If this is true, the content of the link will be provided as well.

Your task is to evaluate the explanation on one metric.

Please make sure you read and understand these instructions carefully. Please keep this document open while reviewing, and refer to it as needed.

Evaluation Criteria:

Actionability (0-5) - misinformation detection and factual correction backed up by credible sources. The explanation should provide an indication of which parts of the claim include misalignment with the evidence.In addition, the explanation should provide a corrected version of the erroneous claim.

Evaluation Steps:

1. Read the claim, evidence and the explanation carefully.
2. Compare the claim with the evidence and identify the errors or misalignment parts between the claim and the evidence.
3. Assess how well the explanation covers the errors detected and the degree of error correction of the claim in the explanation.
4. If there is a link in the explanation, assess if the content of the link provided is both relevant and supporting to the explanation.
5. Assign a score from 1 to 5 to the metric.
6. Your output should be scores only.

Claim:

{claim}

Evidence:

{evidence}

Label:

{label}

Explanation:

{explanation}

link content:

{link_content}

Evaluation Form (scores ONLY):

- Actionability:""",
)

PROMETHEUS_ACTIONABILITY = PromptTemplate(
    id="prometheus_actionability",
    body="""An instruction (might include an Input inside it), a response to evaluate, and a score rubric representing a evaluation criteria are given.
1. Write a detailed feedback that assess the quality of the response strictly based on the given score rubric, not evaluating in general.
2. After writing a feedback, write a score that is an integer between 1 and 5. You should refer to the score rubric.
3. The output format should look as follows: "Feedback: (write a feedback for criteria) [RESULT] (an integer number between 1 and 5)"
4. Please do not generate any other opening, closing, and explanations.

###The instruction to evaluate: You will be given a claim, some credible information called the evidence, a label that shows whether the claim is true or false, and an response that explains the label.
Evaluate the actionability of the response by examining misinformation detection and factual correction backed up by credible sources. The response should provide an indication of which parts of the claim include misalignment with the evidence. In addition, the response should provide a corrected version of the erroneous claim and a web link or a source that it relies on.

###Claim:
{claim}

###Evidence:
{evidence}

###Label:
{label}

###Response to evaluate:
{response}

###Score Rubrics:

"criteria":"Is the model proficient in detecting and correcting the error or misalgnment between the response and the evidence and also providing supporting sources",

"score1_description":"The model detects the error or misalihnment without correcting it. In addition sources are not mentioned",
"score2_description":"The model corrects the error or misalignment, but doesn't point out where the error is. In addition sources are not mentioned",
"score3_description":"The model typically detects the error or misalignment and explicitly mentions it. The model also  provides correction of the error. In addition sources are not mentioned ",
"score4_description":"The model consistently detects the error or misalignment and explicitly mentions it. The model also  provides correction of the error. In addition sources are  mentioned",
"score5_description":"The model excels in the detection of errors or misalignment and explicitly mentions it. The model also  provides correction of the error. In addition,  sources/links that have relevant and supporting content are included in the explanation.\"""",
)

PROMETHEUS_ACTIONABILITY_WITH_LINKS = PromptTemplate(
    id="prometheus_actionability_with_links",
    body="""###Task Description:

An instruction (might include an Input inside it), a response to evaluate, and a score rubric representing a evaluation criteria are given.
1. Write a detailed feedback that assess the quality of the response strictly based on the given score rubric, not evaluating in general.
2. After writing a feedback, write a score that is an integer between 1 and 5. You should refer to the score rubric.
3. The output format should look as follows: "Feedback: (write a feedback for criteria) [RESULT] (an integer number between 1 and 5)"
4. Please do not generate any other opening, closing, and explanations.

###The instruction to evaluate:

You will be given a claim, some credible information called the evidence, a label that shows whether the claim is true or false, and an response that explains the label. If the response contains a link, the content of the link will be provided as well. Evaluate the actionability of the response by examining misinformation detection and factual correction backed up by credible sources. The response should provide an indication of which parts of the claim include misalignment with the evidence. In addition, the response should provide a corrected version of the erroneous claim and a web link or a source that it relies on. The content of the link should support the response.

###Claim:
{claim}

###Evidence:
{evidence}

###Label:
{label}

###Response to evaluate:
{response}

###link content:
{link_content}

###Score Rubrics:

"criteria":"Is the model proficient in detecting and correcting the error or misalgnment between the response and the evidence and also providing supporting sources",
"score1_description":"The model detects the error or misalihnment without correcting it. In addition sources are not mentioned",
"score2_description":"The model corrects the error or misalignment, but doesn't point out where the error is. In addition sources are not mentioned",
"score3_description":"The model typically detects the error or misalignment and explicitly mentions it. The model also  provides correction of the error. In addition sources are not mentioned ",
"score4_description":"The model consistently detects the error or misalignment and explicitly mentions it. The model also  provides correction of the error. In addition sources are  mentioned",
"score5_description":"The model excels in the detection of errors or misalignment and explicitly mentions it. The model also  provides correction of the error. In addition credible and faithful sources are mentioned. The content of the sources or links supports the response.\"""",
)

GENERATE_EXPLANATION = PromptTemplate(
    id="generate_explanation",
    body="""You will be given a claim, some credible information called the evidence, a label that shows whether the claim is true or false.

Your task is to generate an actionable explanation for the label of the claim based on the evidence.

Please make sure you read and understand these instructions carefully. Please keep this document open while reviewing, and refer to it as needed.

Explanation Criteria:

Actionability - misinformation detection and factual correction backed up by credible sources. The explanation should provide an indication of which parts of the claim include misalignment with the evidence. In addition, the explanation should provide a corrected version of the erroneous claim.

Evaluation Steps:

1. Read the claim, evidence and the explanation carefully.
2. Compare the claim with the evidence and identify the errors or misalignment parts between the claim and the evidence.
3. Generate an explanation that clearly mentions the errors detected in the claim and corrects these errors based on the evidence.
4. Don't respond with any information outside the provided evidence. Your are restricted to answer from the evidence only.

Claim:
{claim}

Evidence:
{evidence}

Label:
{label}""",
)

GENERATE_SUPPORTING_LINK = PromptTemplate(
    id="generate_supporting_link",
    body="""You will be given some information called the explanation.

Your task is to generate a correct and working web link for a source supporting the explanation.

Please make sure you read and understand these instructions carefully. Please keep this document open while reviewing, and refer to it as needed.

Steps:

1. The web link provided should be correct and working.
2. The web link should open a page that has information relevant to the explanation.
3. The web link should open a page that has information supporting and in alignment with the explanation.

Explanation:
{explanation}""",
)

ALL_TEMPLATES: tuple[PromptTemplate, ...] = (
    SEGMENT_CLAIM,
    JUDGE_EXPLANATION,
    JUDGE_EXPLANATION_WITH_LINKS,
    GEVAL_ACTIONABILITY,
    GEVAL_ACTIONABILITY_WITH_LINKS,
    PROMETHEUS_ACTIONABILITY,
    PROMETHEUS_ACTIONABILITY_WITH_LINKS,
    GENERATE_EXPLANATION,
    GENERATE_SUPPORTING_LINK,
)

TEMPLATES_BY_ID: dict[str, PromptTemplate] = {t.id: t for t in ALL_TEMPLATES}
