// Stand-in for the jQuery declaration file: just enough surface for the
// demo page (element creation, attributes, containment, state checks and
// click handlers).

declare var jQuery : JQueryStatic;

interface JQueryStatic {
    (selector: string, context?: any): JQuery;
}

interface JQuery {
    attr(attributeName: string): string;
    attr(attributeName: string, value: any): JQuery;
    append(content: any): JQuery;
    is(selector: string): any;
    click(handler: any): JQuery;
}
