/** Labeled-paragraph fixtures frozen as the backend's canonical bytes.
 *
 * Each string is exactly what the reference serializer produces for the
 * object it encodes, so round-tripping through JSON.parse and our
 * canonicalJson must reproduce it byte for byte.
 */

import { LabeledParagraphJson } from "../src/types.js";

export const CANONICAL_FIXTURES = {
  mixed:
    "{\"citation_marks\":[{\"bib_key\":\"BIBREF0\",\"cited_paper_id\":null,\"end\":41,\"start\":17},{\"bib_key\":\"BIBREF1\",\"cited_paper_id\":null,\"end\":118,\"start\":97},{\"bib_key\":\"BIBREF2\",\"cited_paper_id\":null,\"end\":232,\"start\":212}],\"index\":1,\"paper_id\":\"P000\",\"sentence_labels\":[\"single_summ\",\"single_summ\",\"transition\",\"narrative_cite\"],\"sentences\":[[0,79],[79,156],[156,212],[212,259]],\"spans\":[{\"citations\":[{\"bib_key\":\"BIBREF0\",\"cited_paper_id\":null,\"end\":41,\"start\":17,\"type\":\"dominant\"}],\"continuation\":false,\"end\":77,\"start\":0,\"type\":\"dominant\"},{\"citations\":[{\"bib_key\":\"BIBREF1\",\"cited_paper_id\":null,\"end\":118,\"start\":97,\"type\":\"dominant\"}],\"continuation\":false,\"end\":154,\"start\":79,\"type\":\"dominant\"},{\"citations\":[{\"bib_key\":\"BIBREF2\",\"cited_paper_id\":null,\"end\":232,\"start\":212,\"type\":\"reference\"}],\"continuation\":false,\"end\":237,\"start\":212,\"type\":\"reference\"}],\"text\":\"Encoder proposes (Tanaka and Singh, 2018) architecture the introduces encoder. Presents proposes (Okafor et al., 2018) architecture data baseline presents. Evaluation analysis features corpus turn moreover next. Moreau et al. (2010) data performance standard.\",\"tokens\":[[0,7],[8,16],[17,18],[18,24],[25,28],[29,34],[34,35],[36,40],[40,41],[42,54],[55,58],[59,69],[70,77],[77,78],[79,87],[88,96],[97,98],[98,104],[105,107],[108,110],[110,111],[111,112],[113,117],[117,118],[119,131],[132,136],[137,145],[146,154],[154,155],[156,166],[167,175],[176,184],[185,191],[192,196],[197,205],[206,210],[210,211],[212,218],[219,221],[222,224],[224,225],[226,227],[227,231],[231,232],[233,237],[238,249],[250,258],[258,259]]}",
  embedded:
    "{\"citation_marks\":[{\"bib_key\":\"BIBREF0\",\"cited_paper_id\":null,\"end\":56,\"start\":42},{\"bib_key\":\"BIBREF1\",\"cited_paper_id\":null,\"end\":112,\"start\":91},{\"bib_key\":\"BIBREF2\",\"cited_paper_id\":null,\"end\":139,\"start\":126}],\"index\":0,\"paper_id\":\"P001\",\"sentence_labels\":[\"reflection\",\"single_summ\"],\"sentences\":[[0,70],[70,151]],\"spans\":[{\"citations\":[{\"bib_key\":\"BIBREF0\",\"cited_paper_id\":null,\"end\":56,\"start\":42,\"type\":\"reference\"}],\"continuation\":false,\"end\":56,\"start\":42,\"type\":\"reference\"},{\"citations\":[{\"bib_key\":\"BIBREF1\",\"cited_paper_id\":null,\"end\":112,\"start\":91,\"type\":\"dominant\"},{\"bib_key\":\"BIBREF2\",\"cited_paper_id\":null,\"end\":139,\"start\":126,\"type\":\"reference\"}],\"continuation\":false,\"end\":150,\"start\":70,\"type\":\"dominant\"}],\"text\":\"Training limitation training data differs (Garcia, 2019) the whereas. Performance proposes (Moreau et al., 2010) features the (Singh, 2010) introduces.\",\"tokens\":[[0,8],[9,19],[20,28],[29,33],[34,41],[42,43],[43,49],[49,50],[51,55],[55,56],[57,60],[61,68],[68,69],[70,81],[82,90],[91,92],[92,98],[99,101],[102,104],[104,105],[105,106],[107,111],[111,112],[113,121],[122,125],[126,127],[127,132],[132,133],[134,138],[138,139],[140,150],[150,151]]}",
  multidom:
    "{\"citation_marks\":[{\"bib_key\":\"BIBREF0\",\"cited_paper_id\":null,\"end\":18,\"start\":0},{\"bib_key\":\"BIBREF1\",\"cited_paper_id\":null,\"end\":91,\"start\":77},{\"bib_key\":\"BIBREF2\",\"cited_paper_id\":null,\"end\":152,\"start\":138}],\"index\":2,\"paper_id\":\"P000\",\"sentence_labels\":[\"narrative_cite\",\"single_summ\",\"single_summ\",\"transition\",\"transition\",\"reflection\"],\"sentences\":[[0,65],[65,113],[113,171],[171,221],[221,263],[263,317]],\"spans\":[{\"citations\":[{\"bib_key\":\"BIBREF0\",\"cited_paper_id\":null,\"end\":18,\"start\":0,\"type\":\"reference\"}],\"continuation\":false,\"end\":18,\"start\":0,\"type\":\"reference\"},{\"citations\":[{\"bib_key\":\"BIBREF1\",\"cited_paper_id\":null,\"end\":91,\"start\":77,\"type\":\"dominant\"},{\"bib_key\":\"BIBREF2\",\"cited_paper_id\":null,\"end\":152,\"start\":138,\"type\":\"dominant\"}],\"continuation\":false,\"end\":156,\"start\":65,\"type\":\"dominant\"}],\"text\":\"Chen et al. (2012) results evaluation results training standard. The encoder (Okafor, 2020) baseline introduces. Proposes results encoder (Okafor, 2020) the architecture. Analysis next training next corpus training turn. Features moreover evaluation review next. Contrast corpus limitation limitation analysis unlike.\",\"tokens\":[[0,4],[5,7],[8,10],[10,11],[12,13],[13,17],[17,18],[19,26],[27,37],[38,45],[46,54],[55,63],[63,64],[65,68],[69,76],[77,78],[78,84],[84,85],[86,90],[90,91],[92,100],[101,111],[111,112],[113,121],[122,129],[130,137],[138,139],[139,145],[145,146],[147,151],[151,152],[153,156],[157,169],[169,170],[171,179],[180,184],[185,193],[194,198],[199,205],[206,214],[215,219],[219,220],[221,229],[230,238],[239,249],[250,256],[257,261],[261,262],[263,271],[272,278],[279,289],[290,300],[301,309],[310,316],[316,317]]}",
  escaping:
    "{\"a\":{\"empty\":[],\"nested\":true,\"nil\":null},\"text\":\"caf\u00e9 \\\"x\\\" \\\\ \u2192 \\n tab\\t end\",\"z\":[1,0,-3]}",
} as const;

export type FixtureName = "mixed" | "embedded" | "multidom";

export function loadFixture(name: FixtureName): LabeledParagraphJson {
  return JSON.parse(CANONICAL_FIXTURES[name]) as LabeledParagraphJson;
}
