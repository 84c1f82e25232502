declare var jQuery : JQueryStatic;

interface JQueryStatic {
    (selector: string, context?: any): JQuery;
}

interface JQuery {
    attr(attributeName: string): string;
    attr(attributeName: string, value: any): JQuery;
}
